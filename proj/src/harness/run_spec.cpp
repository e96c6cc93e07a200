#include "combrs/harness/run_spec.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace combrs::harness {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& items, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

// Reads fields of one JSON object, collecting every problem instead of
// stopping at the first.
class Reader {
public:
    Reader(const json& obj, std::string path, std::vector<std::string>& errors)
        : obj_(obj), path_(std::move(path)), errors_(errors) {
        if (!obj_.is_object()) fail(path_, "expected an object");
    }

    template <typename T>
    void read(const char* key, T& out) {
        seen_.push_back(key);
        if (!obj_.is_object() || !obj_.contains(key)) return;
        const json& v = obj_.at(key);
        const std::string field = path_ + "." + key;
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) return fail(field, "expected a boolean");
            out = v.get<bool>();
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
            if (!v.is_number_unsigned()) return fail(field, "expected a non-negative integer");
            out = v.get<std::uint64_t>();
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) return fail(field, "expected an integer");
            out = v.get<T>();
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) return fail(field, "expected a number");
            out = v.get<T>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) return fail(field, "expected a string");
            out = v.get<std::string>();
        } else if constexpr (std::is_same_v<T, std::vector<int>>) {
            if (!v.is_array()) return fail(field, "expected an array of integers");
            out.clear();
            for (const auto& e : v) {
                if (!e.is_number_integer()) return fail(field, "expected an array of integers");
                out.push_back(e.get<int>());
            }
        } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
            if (!v.is_array()) return fail(field, "expected an array of strings");
            out.clear();
            for (const auto& e : v) {
                if (!e.is_string()) return fail(field, "expected an array of strings");
                out.push_back(e.get<std::string>());
            }
        }
    }

    // Parses a string field through `convert`, reporting its exception text.
    template <typename T, typename Fn>
    void read_enum(const char* key, T& out, Fn convert) {
        std::string s;
        const bool present = obj_.is_object() && obj_.contains(key);
        read(key, s);
        if (!present || !obj_.at(key).is_string()) return;
        try {
            out = convert(s);
        } catch (const std::exception& e) {
            fail(path_ + "." + key, e.what());
        }
    }

    bool has(const char* key) const { return obj_.is_object() && obj_.contains(key); }
    const json& at(const char* key) {
        seen_.push_back(key);
        return obj_.at(key);
    }
    std::string field(const char* key) const { return path_ + "." + key; }

    void reject_unknown() {
        if (!obj_.is_object()) return;
        for (const auto& [k, v] : obj_.items()) {
            if (std::find(seen_.begin(), seen_.end(), k) == seen_.end()) fail(path_ + "." + k, "unknown field");
        }
    }

    void fail(const std::string& field, const std::string& msg) { errors_.push_back(field + ": " + msg); }

private:
    const json& obj_;
    std::string path_;
    std::vector<std::string>& errors_;
    std::vector<std::string> seen_;
};

void read_pattern(Reader& r, RunSpec& spec, std::vector<std::string>& errors) {
    PatternConfig& p = spec.pattern;
    r.read("n_fft", p.numerology.n_fft);
    r.read("n_cp", p.numerology.n_cp);
    r.read("scs_hz", p.numerology.scs_hz);
    r.read("s_sub", p.s_sub);
    r.read("s_sym", p.s_sym);
    r.read_enum("scheme", p.scheme, scheme_from_string);
    r.read("base_offset", p.base_offset);
    r.read("slope", p.slope);
    r.read("m_symbols", p.m_symbols);
    const bool explicit_offsets = r.has("offsets");
    r.read("offsets", p.offsets);
    if (r.has("scrambling")) {
        Reader s(r.at("scrambling"), r.field("scrambling"), errors);
        s.read_enum("kind", spec.scrambling.kind, scrambling_kind_from_string);
        s.read("root", spec.scrambling.root);
        s.read("independent_roots", spec.scrambling.independent_roots);
        s.reject_unknown();
    }
    r.reject_unknown();

    if (!explicit_offsets) {
        try {
            p.offsets = make_offsets(p.scheme, p.s_sub, p.m_symbols, p.base_offset, p.slope);
        } catch (const ConfigError& e) {
            for (const auto& v : e.violations()) errors.push_back("pattern: " + v.message);
            return;
        } catch (const std::exception& e) {
            errors.push_back(std::string("pattern: ") + e.what());
            return;
        }
    }
    for (const auto& v : validate_config(p)) errors.push_back("pattern: " + v.message);
}

}  // namespace

SpecError::SpecError(std::vector<std::string> errors)
    : std::invalid_argument("invalid run spec: " + join(errors, "; ")), errors_(std::move(errors)) {}

bool operator==(const RunSpec& a, const RunSpec& b) {
    if (a.targets.size() != b.targets.size()) return false;
    for (std::size_t i = 0; i < a.targets.size(); ++i) {
        const auto& x = a.targets[i];
        const auto& y = b.targets[i];
        if (x.delay_samples != y.delay_samples || x.doppler_hz != y.doppler_hz || x.amplitude != y.amplitude)
            return false;
    }
    return a.pattern == b.pattern && a.scrambling == b.scrambling && a.channel == b.channel &&
           a.receiver == b.receiver && a.region == b.region && a.grids == b.grids && a.outputs == b.outputs &&
           a.dynamic_range_db == b.dynamic_range_db;
}

RunSpec parse_run_spec(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw SpecError({std::string("config: ") + e.what()});
    }

    RunSpec spec;
    std::vector<std::string> errors;
    Reader top(root, "config", errors);
    int version = kSpecSchemaVersion;
    top.read("schema_version", version);
    if (version != kSpecSchemaVersion)
        errors.push_back("config.schema_version: unsupported version " + std::to_string(version));

    if (top.has("pattern")) {
        Reader r(top.at("pattern"), "pattern", errors);
        read_pattern(r, spec, errors);
    } else {
        spec.pattern.offsets = make_offsets(spec.pattern.scheme, spec.pattern.s_sub, spec.pattern.m_symbols);
    }

    if (top.has("targets")) {
        const json& arr = top.at("targets");
        if (!arr.is_array()) {
            errors.push_back("targets: expected an array");
        } else {
            for (std::size_t i = 0; i < arr.size(); ++i) {
                const std::string path = "targets[" + std::to_string(i) + "]";
                Reader r(arr[i], path, errors);
                Target t;
                double re = 1.0, im = 0.0;
                r.read("delay_samples", t.delay_samples);
                r.read("doppler_hz", t.doppler_hz);
                r.read("amplitude_re", re);
                r.read("amplitude_im", im);
                r.reject_unknown();
                if (t.delay_samples < 0) errors.push_back(path + ".delay_samples: must be non-negative");
                t.amplitude = {re, im};
                spec.targets.push_back(t);
            }
        }
    }

    if (top.has("channel")) {
        Reader r(top.at("channel"), "channel", errors);
        r.read("noise_power_linear", spec.channel.noise_power_linear);
        r.read_enum("doppler_model", spec.channel.doppler_model, doppler_model_from_string);
        r.read("seed", spec.channel.seed);
        r.reject_unknown();
        if (spec.channel.noise_power_linear < 0.0)
            errors.push_back("channel.noise_power_linear: must be non-negative");
    }

    if (top.has("receiver")) {
        Reader r(top.at("receiver"), "receiver", errors);
        r.read("gi_l", spec.receiver.gi_l);
        r.read_enum("window", spec.receiver.window, af_window_from_string);
        r.reject_unknown();
        if (spec.receiver.gi_l < 0 || spec.receiver.gi_l >= spec.pattern.s_sub)
            errors.push_back("receiver.gi_l: must lie in [0, s_sub)");
    }

    if (top.has("region")) {
        Reader r(top.at("region"), "region", errors);
        RegionRequest req;
        r.read_enum("choice", req.choice, region_choice_from_string);
        r.read("l", req.l);
        r.read("variant", req.variant);
        r.reject_unknown();
        spec.region = req;
    }

    if (top.has("grids")) {
        Reader r(top.at("grids"), "grids", errors);
        r.read("tau_points", spec.grids.tau_points);
        r.read("fd_points", spec.grids.fd_points);
        r.reject_unknown();
        if (spec.grids.tau_points < 0) errors.push_back("grids.tau_points: must be non-negative");
        if (spec.grids.fd_points < 0) errors.push_back("grids.fd_points: must be non-negative");
    }

    if (top.has("outputs")) {
        Reader r(top.at("outputs"), "outputs", errors);
        r.read("formats", spec.outputs.formats);
        r.read("directory", spec.outputs.directory);
        r.reject_unknown();
        for (const auto& f : spec.outputs.formats) {
            const auto& known = known_formats();
            if (std::find(known.begin(), known.end(), f) == known.end())
                errors.push_back("outputs.formats: unknown format '" + f + "'");
        }
    }

    if (top.has("verify")) {
        Reader r(top.at("verify"), "verify", errors);
        r.read("dynamic_range_db", spec.dynamic_range_db);
        r.reject_unknown();
        if (spec.dynamic_range_db >= 0.0) errors.push_back("verify.dynamic_range_db: must be negative");
    }
    top.reject_unknown();

    if (!errors.empty()) throw SpecError(std::move(errors));
    return spec;
}

RunSpec load_run_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError({"config: cannot open '" + path + "'"});
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_run_spec(buf.str());
}

std::string dump_run_spec(const RunSpec& spec) {
    const auto& p = spec.pattern;
    json j;
    j["schema_version"] = kSpecSchemaVersion;
    j["pattern"] = {
        {"n_fft", p.numerology.n_fft},
        {"n_cp", p.numerology.n_cp},
        {"scs_hz", p.numerology.scs_hz},
        {"s_sub", p.s_sub},
        {"s_sym", p.s_sym},
        {"scheme", std::string(to_string(p.scheme))},
        {"base_offset", p.base_offset},
        {"slope", p.slope},
        {"m_symbols", p.m_symbols},
        {"offsets", p.offsets},
        {"scrambling",
         {{"kind", std::string(to_string(spec.scrambling.kind))},
          {"root", spec.scrambling.root},
          {"independent_roots", spec.scrambling.independent_roots}}},
    };
    json targets = json::array();
    for (const auto& t : spec.targets) {
        targets.push_back({{"delay_samples", t.delay_samples},
                           {"doppler_hz", t.doppler_hz},
                           {"amplitude_re", t.amplitude.real()},
                           {"amplitude_im", t.amplitude.imag()}});
    }
    j["targets"] = targets;
    j["channel"] = {{"noise_power_linear", spec.channel.noise_power_linear},
                    {"doppler_model", std::string(to_string(spec.channel.doppler_model))},
                    {"seed", spec.channel.seed}};
    j["receiver"] = {{"gi_l", spec.receiver.gi_l}, {"window", std::string(to_string(spec.receiver.window))}};
    if (spec.region) {
        j["region"] = {{"choice", std::string(to_string(spec.region->choice))},
                       {"l", spec.region->l},
                       {"variant", spec.region->variant}};
    }
    j["grids"] = {{"tau_points", spec.grids.tau_points}, {"fd_points", spec.grids.fd_points}};
    j["outputs"] = {{"formats", spec.outputs.formats}, {"directory", spec.outputs.directory}};
    j["verify"] = {{"dynamic_range_db", spec.dynamic_range_db}};
    return j.dump(2) + "\n";
}

}  // namespace combrs::harness
