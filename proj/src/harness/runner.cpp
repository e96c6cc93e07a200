#include "combrs/harness/runner.hpp"

#include "combrs/delay_sum.hpp"
#include "combrs/harness/export.hpp"
#include "combrs/post_fft.hpp"
#include "combrs/region.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>

namespace combrs::harness {

using nlohmann::json;

std::string_view to_string(Subcommand s) {
    switch (s) {
        case Subcommand::kAf: return "af";
        case Subcommand::kRdmap: return "rdmap";
        case Subcommand::kPredict: return "predict";
        case Subcommand::kVerify: return "verify";
        case Subcommand::kGiDemo: return "gi-demo";
    }
    return "?";
}

Subcommand subcommand_from_string(std::string_view s) {
    for (Subcommand c : {Subcommand::kAf, Subcommand::kRdmap, Subcommand::kPredict, Subcommand::kVerify,
                         Subcommand::kGiDemo})
        if (to_string(c) == s) return c;
    throw std::invalid_argument("unknown subcommand '" + std::string(s) + "'");
}

namespace {

bool wants(const RunSpec& spec, const char* format) {
    const auto& f = spec.outputs.formats;
    return std::find(f.begin(), f.end(), format) != f.end();
}

json peak_json(const SidePeak& p) {
    json j = {{"tau_sec", p.tau_sec},
              {"fd_hz", p.fd_hz},
              {"tau_over_ts", to_string(p.tau_ts)},
              {"fd_times_t", to_string(p.fd_t)},
              {"delay_index", p.delay_index},
              {"doppler_index", p.doppler_index},
              {"level", p.level},
              {"level_db", to_db(p.level)},
              {"major", p.major}};
    if (p.g >= 0) {
        j["g"] = p.g;
        j["q"] = p.q;
    }
    return j;
}

json prediction_json(const PeakPrediction& pred) {
    json peaks = json::array();
    for (const auto& p : pred.peaks) peaks.push_back(peak_json(p));
    json exceptions = json::array();
    for (const auto& [tau, fd] : pred.exceptions) exceptions.push_back({{"tau_sec", tau}, {"fd_hz", fd}});
    json j = {{"algorithm", std::string(to_string(pred.algorithm))},
              {"target_tau_sec", pred.target_tau_sec},
              {"target_fd_hz", pred.target_fd_hz},
              {"peaks", peaks},
              {"exceptions", exceptions}};
    if (pred.target_g >= 0) {
        j["target_g"] = pred.target_g;
        j["target_q"] = pred.target_q;
    }
    return j;
}

json match_json(const MatchReport& r) {
    json missing = json::array();
    for (const auto& m : r.missing) {
        json p = peak_json(m.peak);
        p["surface_level_db"] = m.surface_level_db;
        missing.push_back(p);
    }
    json unexpected = json::array();
    for (const auto& u : r.unexpected)
        unexpected.push_back({{"tau_sec", u.tau_sec}, {"fd_hz", u.fd_hz}, {"level_db", u.level_db}});
    return {{"dynamic_range_db", r.dynamic_range_db},
            {"required_peaks", r.required},
            {"surface_maxima", r.surface_maxima},
            {"matched", r.matched.size()},
            {"missing", missing},
            {"unexpected", unexpected},
            {"ok", r.ok()}};
}

json region_json(const UnambiguityRegion& region, const Numerology& nm) {
    json pieces = json::array();
    for (const auto& p : region.pieces) {
        pieces.push_back({{"tau_min_over_ts", to_string(p.tau_min)},
                          {"tau_max_over_ts", to_string(p.tau_max)},
                          {"tau_min_closed", p.tau_min_closed},
                          {"tau_max_closed", p.tau_max_closed},
                          {"fd_min_times_t", to_string(p.fd_min)},
                          {"fd_max_times_t", to_string(p.fd_max)},
                          {"tau_min_sec", p.tau_min.value() * nm.t_s_sec()},
                          {"tau_max_sec", p.tau_max.value() * nm.t_s_sec()},
                          {"fd_min_hz", p.fd_min.value() / nm.t_sec()},
                          {"fd_max_hz", p.fd_max.value() / nm.t_sec()}});
    }
    return {{"label", region.label()},
            {"choice", std::string(to_string(region.choice))},
            {"l", region.l},
            {"variant", region.variant},
            {"mirrored", region.mirrored},
            {"pieces", pieces}};
}

// Every region choice that applies to the scheme.
std::vector<RegionRequest> applicable_regions(const PatternConfig& config) {
    std::vector<RegionRequest> out{{RegionChoice::kFractional, 0, 1}};
    if (config.scheme == Scheme::B) out.push_back({RegionChoice::kDoubleFractional, 0, 1});
    if (config.scheme == Scheme::C || config.scheme == Scheme::D) out.push_back({RegionChoice::kFullSymbol, 0, 1});
    if (config.scheme == Scheme::D) {
        for (int l = 2; l <= config.s_sub - 1; ++l)
            for (int v : {1, 2}) out.push_back({RegionChoice::kPartialL, l, v});
    }
    return out;
}

json regions_json(const PatternConfig& config) {
    json arr = json::array();
    for (const auto& req : applicable_regions(config)) {
        try {
            arr.push_back(region_json(unambiguity_region(config, req), config.numerology));
        } catch (const RegionError& e) {
            json j = {{"choice", std::string(to_string(req.choice))}, {"error", e.what()}};
            if (req.choice == RegionChoice::kPartialL) {
                j["l"] = req.l;
                j["variant"] = req.variant;
            }
            arr.push_back(j);
        }
    }
    return arr;
}

json spec_json(const RunSpec& spec) {
    // The output directory is a property of the invocation, not the run.
    json j = json::parse(dump_run_spec(spec));
    j["outputs"].erase("directory");
    return j;
}

json pattern_json(const PatternConfig& config) {
    const auto& nm = config.numerology;
    return {{"offsets", config.offsets},
            {"comb_bins", config.comb_bins()},
            {"n_prime", nm.n_prime()},
            {"t_s_sec", nm.t_s_sec()},
            {"t_cp_sec", nm.t_cp_sec()},
            {"t_sec", nm.t_sec()},
            {"sample_period_sec", nm.sample_period_sec()}};
}

json sidecar_json(const TimeFrame& frame, const std::string& data_file) {
    return {{"data_file", data_file},
            {"encoding", "float64 little-endian, interleaved re/im"},
            {"samples", frame.samples.size()},
            {"sample_period_sec", frame.sample_period_sec},
            {"symbol_starts", frame.symbol_starts},
            {"n_prime", frame.config.numerology.n_prime()}};
}

class Context {
public:
    Context(const RunSpec& spec, const RunOptions& options) : spec_(spec), options_(options) {}

    void text(const std::string& name, const std::string& body) {
        write_text(options_.out_dir / name, body);
        files_.push_back(name);
    }

    void bytes(const std::string& name, const std::vector<std::uint8_t>& body) {
        write_bytes(options_.out_dir / name, body);
        files_.push_back(name);
    }

    void matrix(const std::string& stem, const LabeledMatrix& m, bool power, const std::string& quantity) {
        if (wants(spec_, "csv")) text(stem + ".csv", format_csv(m));
        if (wants(spec_, "pgm")) text(stem + ".pgm", format_pgm(m.values, power));
        if (wants(spec_, "json")) text(stem + ".json", format_matrix_json(m, quantity));
    }

    void raw(const std::string& stem, const TimeFrame& frame) {
        if (!wants(spec_, "raw")) return;
        bytes(stem + ".f64", encode_samples_f64le(frame.samples));
        text(stem + ".sidecar.json", sidecar_json(frame, stem + ".f64").dump(2) + "\n");
    }

    std::vector<std::string> files() const {
        auto f = files_;
        std::sort(f.begin(), f.end());
        return f;
    }

private:
    const RunSpec& spec_;
    const RunOptions& options_;
    std::vector<std::string> files_;
};

TimeFrame transmit(const RunSpec& spec, const ScramblingSequence& scrambling) {
    return build_frame(spec.pattern, scrambling);
}

std::vector<Target> targets_or_default(const RunSpec& spec) {
    if (!spec.targets.empty()) return spec.targets;
    return {Target{}};
}

json run_af(const RunSpec& spec, Context& ctx) {
    const auto scrambling = make_scrambling(spec.pattern, spec.scrambling);
    const TimeFrame frame = transmit(spec, scrambling);
    const auto tau = default_tau_grid(spec.pattern, spec.grids.tau_points);
    const auto fd = default_fd_grid(spec.pattern, spec.grids.fd_points);
    const AfSurface s = compute_af(frame, tau, fd, spec.receiver.window);

    std::size_t best = 0;
    for (std::size_t i = 1; i < s.magnitudes.data().size(); ++i)
        if (s.magnitudes.data()[i] > s.magnitudes.data()[best]) best = i;

    ctx.matrix("af", {s.tau_axis_sec, s.fd_axis_hz, s.magnitudes}, false, "ambiguity magnitude");
    ctx.raw("frame", frame);
    return {{"window", std::string(to_string(spec.receiver.window))},
            {"tau_points", tau.size()},
            {"fd_points", fd.size()},
            {"normalization_energy", s.normalization_energy},
            {"max_value", s.magnitudes.data()[best]},
            {"max_tau_sec", s.tau_axis_sec[best / fd.size()]},
            {"max_fd_hz", s.fd_axis_hz[best % fd.size()]}};
}

json estimate_json(const RangeDopplerMap& map, const BinEstimate& e) {
    return {{"g", e.g},
            {"q", e.q},
            {"tau_sec", map.tau_axis_sec[e.g]},
            {"fd_hz", map.fd_axis_hz[e.q]},
            {"fd_physical_hz", map.fd_axis_physical_hz[e.q]},
            {"power", e.value}};
}

json run_rdmap(const RunSpec& spec, Context& ctx) {
    if (spec.targets.empty()) throw SpecError({"targets: rdmap needs at least one target"});
    const auto scrambling = make_scrambling(spec.pattern, spec.scrambling);
    const TimeFrame tx = transmit(spec, scrambling);
    const TimeFrame rx = apply_channel(tx, spec.targets, spec.channel.noise_power_linear, spec.channel.doppler_model,
                                       spec.channel.seed);
    const GiSetting setting = GiSetting::for_config(spec.pattern, spec.receiver.gi_l);
    const RangeDopplerMap map = rd_map(receive(rx, scrambling, setting));

    const BinEstimate best = argmax(map);
    json est = {{"argmax", estimate_json(map, best)}};
    std::optional<UnambiguityRegion> region;
    if (spec.region) {
        region = unambiguity_region(spec.pattern, *spec.region);
        const auto in = estimate_in_region(map, *region, spec.pattern.numerology);
        est["region"] = region->label();
        est["in_region"] = in ? estimate_json(map, *in) : json(nullptr);
    }
    const BinEstimate chosen = [&] {
        if (region) {
            if (auto in = estimate_in_region(map, *region, spec.pattern.numerology)) return *in;
        }
        return best;
    }();
    json truth = json::array();
    const int n = spec.pattern.numerology.n_fft;
    for (const auto& t : spec.targets) {
        const int g = t.delay_samples % n;
        const int q = doppler_bin(spec.pattern, t.doppler_hz);
        truth.push_back({{"delay_samples", t.delay_samples},
                         {"doppler_hz", t.doppler_hz},
                         {"g", g},
                         {"q", q},
                         {"within_isi_free_delay", t.delay_samples <= setting.isi_free_delay_samples()},
                         {"estimated", chosen.g == g && chosen.q == q}});
    }
    est["targets"] = truth;

    ctx.matrix("rdmap", {map.tau_axis_sec, map.fd_axis_hz, map.values}, true, "periodogram power");
    ctx.raw("received", rx);
    return {{"gi_l", setting.l},
            {"isi_free_delay_samples", setting.isi_free_delay_samples()},
            {"isi_free_delay_sec", setting.isi_free_delay_sec()},
            {"retained_energy_fraction", setting.retained_energy_fraction()},
            {"fd_axis_physical_hz", map.fd_axis_physical_hz},
            {"estimation", est},
            {"doppler_warnings", doppler_warnings(spec.targets, spec.pattern.numerology)}};
}

json run_predict(const RunSpec& spec) {
    const GiSetting setting = GiSetting::for_config(spec.pattern, spec.receiver.gi_l);
    json fft_targets = json::array();
    for (const auto& t : targets_or_default(spec))
        fft_targets.push_back(prediction_json(predict_2dfft_peaks(spec.pattern, setting, t)));
    json j = {{"delay_sum", prediction_json(predict_side_peaks(spec.pattern, Algorithm::kDelaySum))},
              {"fft2d", prediction_json(predict_side_peaks(spec.pattern, Algorithm::kFft2d))},
              {"rdmap_bins", fft_targets},
              {"regions", regions_json(spec.pattern)},
              {"gi",
               {{"l", setting.l},
                {"isi_free_delay_samples", setting.isi_free_delay_samples()},
                {"isi_free_delay_sec", setting.isi_free_delay_sec()},
                {"retained_energy_fraction", setting.retained_energy_fraction()}}}};
    if (spec.region) j["requested_region"] = region_json(unambiguity_region(spec.pattern, *spec.region), spec.pattern.numerology);
    return j;
}

struct VerifyOutcome {
    json section;
    bool mismatch = false;
};

VerifyOutcome run_verify(const RunSpec& spec, Context& ctx) {
    VerifyOutcome out;
    const auto scrambling = make_scrambling(spec.pattern, spec.scrambling);
    const TimeFrame frame = transmit(spec, scrambling);

    // Delay-and-sum surface on the Doppler-bin lattice.
    const auto tau = default_tau_grid(spec.pattern, spec.grids.tau_points);
    const auto fd = verification_fd_grid(spec.pattern);
    const AfSurface surface = compute_af(frame, tau, fd, spec.receiver.window);
    const auto ds_pred = predict_side_peaks(spec.pattern, Algorithm::kDelaySum);
    const MatchReport ds = verify_prediction(surface, ds_pred, spec.dynamic_range_db);
    out.section["delay_sum"] = match_json(ds);
    out.section["delay_sum"]["window"] = std::string(to_string(spec.receiver.window));
    out.section["delay_sum"]["tau_points"] = tau.size();
    out.section["delay_sum"]["fd_points"] = fd.size();
    out.mismatch |= !ds.ok();
    ctx.matrix("verify_af", {surface.tau_axis_sec, surface.fd_axis_hz, surface.magnitudes}, false,
               "ambiguity magnitude");

    // 2D-FFT periodogram of a noiseless block-Doppler echo.
    const Target target = targets_or_default(spec).front();
    const GiSetting setting = GiSetting::for_config(spec.pattern, spec.receiver.gi_l);
    json fft;
    fft["target"] = {{"delay_samples", target.delay_samples}, {"doppler_hz", target.doppler_hz}};
    if (target.delay_samples > setting.isi_free_delay_samples()) {
        fft["status"] = "skipped";
        fft["reason"] = "target delay exceeds the ISI-free bound of the guard-interval setting";
    } else {
        const TimeFrame rx = apply_channel(frame, {target}, 0.0, DopplerModel::kBlock, spec.channel.seed);
        const RangeDopplerMap map = rd_map(receive(rx, scrambling, setting));
        const auto pred = predict_2dfft_peaks(spec.pattern, setting, target);
        try {
            const MatchReport r = verify_prediction(map, pred, spec.dynamic_range_db);
            fft = match_json(r);
            fft["status"] = "checked";
            out.mismatch |= !r.ok();
        } catch (const GridTooCoarse& e) {
            fft["status"] = "skipped";
            fft["reason"] = e.what();
        }
        fft["target"] = {{"delay_samples", target.delay_samples}, {"doppler_hz", target.doppler_hz}};
        ctx.matrix("verify_rdmap", {map.tau_axis_sec, map.fd_axis_hz, map.values}, true, "periodogram power");
    }
    out.section["fft2d"] = fft;

    // Region soundness against both catalogs.
    json regions = json::array();
    const auto fft_catalog = predict_side_peaks(spec.pattern, Algorithm::kFft2d);
    for (const auto& req : applicable_regions(spec.pattern)) {
        try {
            const auto region = unambiguity_region(spec.pattern, req);
            const bool sound = peaks_inside(region, ds_pred).empty() && peaks_inside(region, fft_catalog).empty();
            regions.push_back({{"label", region.label()}, {"sound", sound}});
            out.mismatch |= !sound;
        } catch (const RegionError& e) {
            regions.push_back({{"choice", std::string(to_string(req.choice))}, {"l", req.l},
                               {"variant", req.variant}, {"error", e.what()}});
        }
    }
    out.section["regions"] = regions;
    out.section["mismatch"] = out.mismatch;
    return out;
}

json run_gi_demo(const RunSpec& spec, Context& ctx) {
    const PatternConfig& config = spec.pattern;
    const auto scrambling = make_scrambling(config, spec.scrambling);
    const TimeFrame frame = transmit(spec, scrambling);
    const auto np = static_cast<std::size_t>(config.numerology.n_prime());
    const std::span<const cd> first(frame.samples.data(), np);
    const auto ncp = static_cast<std::size_t>(config.numerology.n_cp);
    const double stripped_energy = energy(first.subspan(ncp));
    const double doppler = spec.targets.empty() ? 0.0 : spec.targets.front().doppler_hz;

    auto probe = [&](const GiSetting& setting, int delay) -> json {
        if (delay < 0 || static_cast<std::size_t>(delay) >= frame.samples.size()) return nullptr;
        const Target t{delay, doppler, {1.0, 0.0}};
        const TimeFrame rx = apply_channel(frame, {t}, 0.0, DopplerModel::kBlock, spec.channel.seed);
        const double residual = closed_form_residual(receive(rx, scrambling, setting), scrambling, t);
        return {{"delay_samples", delay}, {"residual", residual}, {"recovered", residual <= 1e-9}};
    };

    json rows = json::array();
    std::string csv =
        "l,isi_free_delay_samples,isi_free_delay_sec,retained_energy_predicted,retained_energy_measured,"
        "boundary_delay_samples,boundary_recovered,beyond_delay_samples,beyond_recovered\n";
    for (int l = 0; l < config.s_sub; ++l) {
        const GiSetting setting = GiSetting::for_config(config, l);
        const double measured = energy(remove_extended_gi(first, setting)) / stripped_energy;
        const int boundary = setting.isi_free_delay_samples();
        const json at = probe(setting, boundary);
        const json beyond = probe(setting, boundary + setting.sub_length());
        rows.push_back({{"l", l},
                        {"isi_free_delay_samples", boundary},
                        {"isi_free_delay_sec", setting.isi_free_delay_sec()},
                        {"retained_energy_predicted", setting.retained_energy_fraction()},
                        {"retained_energy_measured", measured},
                        {"at_boundary", at},
                        {"beyond_boundary", beyond}});
        char line[256];
        std::snprintf(line, sizeof line, "%d,%d,%.9g,%.9g,%.9g,%d,%s,%s,%s\n", l, boundary,
                      setting.isi_free_delay_sec(), setting.retained_energy_fraction(), measured, boundary,
                      at.is_null() ? "" : (at["recovered"].get<bool>() ? "yes" : "no"),
                      beyond.is_null() ? "" : std::to_string(beyond["delay_samples"].get<int>()).c_str(),
                      beyond.is_null() ? "" : (beyond["recovered"].get<bool>() ? "yes" : "no"));
        csv += line;
    }
    if (wants(spec, "csv")) ctx.text("gi_demo.csv", csv);
    return {{"doppler_hz", doppler}, {"rows", rows}};
}

}  // namespace

RunResult run(Subcommand subcommand, const RunSpec& spec, const RunOptions& options) {
    require_valid(spec.pattern);
    const auto started = std::chrono::steady_clock::now();
    Context ctx(spec, options);

    json report;
    report["schema_version"] = kReportSchemaVersion;
    report["subcommand"] = std::string(to_string(subcommand));
    report["spec"] = spec_json(spec);
    report["pattern"] = pattern_json(spec.pattern);
    report["warnings"] = doppler_warnings(spec.targets, spec.pattern.numerology);

    RunResult result;
    switch (subcommand) {
        case Subcommand::kAf: report["af"] = run_af(spec, ctx); break;
        case Subcommand::kRdmap: report["rdmap"] = run_rdmap(spec, ctx); break;
        case Subcommand::kPredict: report["predict"] = run_predict(spec); break;
        case Subcommand::kVerify: {
            auto v = run_verify(spec, ctx);
            report["verify"] = v.section;
            if (v.mismatch) result.exit_code = exit_code::kMismatch;
            break;
        }
        case Subcommand::kGiDemo: report["gi_demo"] = run_gi_demo(spec, ctx); break;
    }

    auto files = ctx.files();
    files.push_back("report.json");
    std::sort(files.begin(), files.end());
    report["files"] = files;
    if (options.timing) {
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
        report["timing"] = {{"elapsed_sec", elapsed.count()}};
    }
    result.report = report.dump(2) + "\n";
    write_text(options.out_dir / "report.json", result.report);
    result.files = files;
    return result;
}

}  // namespace combrs::harness
