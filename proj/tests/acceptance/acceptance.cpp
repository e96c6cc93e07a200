// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include "combrs/delay_sum.hpp"
#include "combrs/post_fft.hpp"
#include "combrs/region.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace combrs;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

// 1. Staggered cycle cancels the fractional delay repeats.
Outcome scheme_d_cancellation() {
    constexpr double kTol = 1e-9;
    double worst = 0.0;
    for (int s_sub : {2, 4}) {
        for (int p = 1; p < s_sub; ++p) {
            if (std::gcd(p, s_sub) != 1) continue;
            const auto c = make_pattern({64, 0, 15e3}, s_sub, 1, Scheme::D, s_sub, 0, p);
            const TimeFrame f = build_frame(c, make_scrambling(c));
            std::vector<double> tau{0.0};
            for (int l = 1; l < s_sub; ++l) tau.push_back(l * c.numerology.t_s_sec() / s_sub);
            const auto af = compute_af(f, tau, {0.0});
            for (std::size_t l = 1; l < tau.size(); ++l) worst = std::max(worst, af.at(l, 0) / af.at(0, 0));
        }
    }
    return {worst < kTol, fmt("max side/main = %.3g (tol %.0e)", worst, kTol)};
}

// 2. Catalog vs numeric delay-and-sum surface.
Outcome predictor_agreement() {
    int cases = 0, failed = 0;
    std::string first;
    for (Scheme s : {Scheme::A, Scheme::B, Scheme::C, Scheme::D}) {
        for (int s_sub : {2, 4}) {
            for (int s_sym : {1, 2}) {
                const auto c = make_pattern({64, 0, 15e3}, s_sub, s_sym, s, 2 * s_sub);
                const TimeFrame f = build_frame(c, make_scrambling(c));
                const auto af = compute_af(f, default_tau_grid(c), verification_fd_grid(c));
                const auto r = verify_prediction(af, predict_side_peaks(c, Algorithm::kDelaySum), -13.0);
                ++cases;
                if (!r.ok()) {
                    ++failed;
                    if (first.empty())
                        first = std::string(to_string(s)) + " s_sub=" + std::to_string(s_sub) +
                                " s_sym=" + std::to_string(s_sym);
                }
            }
        }
    }
    std::string d = std::to_string(cases - failed) + "/" + std::to_string(cases) + " configurations clean at -13 dB";
    if (!first.empty()) d += ", first failure " + first;
    return {failed == 0, d};
}

// 3. Each sub-block of a CP-stripped symbol is the first one times e^{j2pi F l / S_sub}.
Outcome repetition_identity() {
    constexpr double kTol = 1e-12;
    double worst = 0.0;
    for (Scheme s : {Scheme::A, Scheme::B, Scheme::C, Scheme::D}) {
        for (int s_sub : {2, 4, 8}) {
            const auto c = make_pattern({64, 8, 15e3}, s_sub, 1, s, 2 * s_sub, 1 % s_sub);
            const auto x = make_scrambling(c);
            const int k = c.comb_bins();
            for (int i = 0; i < c.m_symbols; ++i) {
                const CVec z = modulate_symbol(c, i, x);
                double peak = 0.0;
                for (const auto& v : z) peak = std::max(peak, std::abs(v));
                for (int l = 0; l < s_sub; ++l) {
                    const cd rot = std::polar(1.0, 2.0 * M_PI * c.offsets[i] * l / s_sub);
                    for (int n = 0; n < k; ++n)
                        worst = std::max(worst, std::abs(z[8 + l * k + n] - z[8 + n] * rot) / peak);
                }
            }
        }
    }
    return {worst < kTol, fmt("max relative deviation = %.3g (tol %.0e)", worst, kTol)};
}

// 4. Extended guard interval: exact up to the bound, broken one comb period past it.
Outcome extended_gi() {
    constexpr double kExact = 1e-9, kOnset = 1e-3;
    double worst_in = 0.0, least_out = 1e300;
    for (Scheme s : {Scheme::A, Scheme::B, Scheme::C, Scheme::D}) {
        const auto c = make_pattern({64, 4, 15e3}, 4, 1, s, 8, 1);
        const auto x = make_scrambling(c);
        const TimeFrame tx = build_frame(c, x);
        for (int l = 0; l < 4; ++l) {
            const auto gi = GiSetting::for_config(c, l);
            const int bound = gi.isi_free_delay_samples();
            const double fd = 0.1 / c.numerology.t_sec();
            for (int delay : {bound, bound + gi.sub_length()}) {
                if (delay >= c.numerology.n_prime()) continue;
                const Target t{delay, fd, {1.0, 0.0}};
                const auto rx = apply_channel(tx, {t}, 0.0, DopplerModel::kBlock, 1);
                const double r = closed_form_residual(receive(rx, x, gi), x, t);
                if (delay == bound) {
                    worst_in = std::max(worst_in, r);
                } else {
                    least_out = std::min(least_out, r);
                }
            }
        }
    }
    return {worst_in < kExact && least_out > kOnset,
            fmt("max residual at bound = %.3g, min residual past bound = %.3g", worst_in, least_out)};
}

// 5. Kept energy after the extended guard interval.
Outcome energy_tradeoff() {
    constexpr double kTol = 1e-12;
    double worst = 0.0;
    for (Scheme s : {Scheme::A, Scheme::B, Scheme::C, Scheme::D}) {
        for (int s_sub : {2, 4, 8}) {
            const auto c = make_pattern({64, 8, 15e3}, s_sub, 1, s, 2 * s_sub);
            const auto x = make_scrambling(c);
            for (int i = 0; i < c.m_symbols; ++i) {
                const CVec z = modulate_symbol(c, i, x);
                const double full = energy(std::span<const cd>(z).subspan(8));
                for (int l = 0; l < s_sub; ++l) {
                    const auto gi = GiSetting::for_config(c, l);
                    const double kept = energy(remove_extended_gi(z, gi)) / full;
                    worst = std::max(worst, std::abs(kept - gi.retained_energy_fraction()));
                }
            }
        }
    }
    return {worst < kTol, fmt("max |measured - (S_sub - l)/S_sub| = %.3g (tol %.0e)", worst, kTol)};
}

// 6. Periodogram side-peak bins and the (0, +-1/T) exception set.
Outcome fft2d_formulas() {
    const double threshold_db = -13.0;
    int cases = 0, failed = 0;
    for (Scheme s : {Scheme::A, Scheme::D}) {
        for (int s_sym : {1, 2}) {
            const auto c = make_pattern({64, 0, 15e3}, 4, s_sym, s, 8);
            const auto x = make_scrambling(c);
            const auto gi = GiSetting::for_config(c, 0);
            for (const Target& t : {Target{0, 0.0, {1.0, 0.0}}, Target{7, 3.0 / (8 * c.numerology.t_sec()), {1.0, 0.0}}}) {
                const auto rx = apply_channel(build_frame(c, x), {t}, 0.0, DopplerModel::kBlock, 1);
                const auto map = rd_map(receive(rx, x, gi));
                const auto pred = predict_2dfft_peaks(c, gi, t);
                Matrix<double> amp = map.values;
                for (auto& v : amp.data()) v = std::sqrt(v);
                const double top = *std::max_element(amp.data().begin(), amp.data().end());
                const double thr = top * std::pow(10.0, threshold_db / 20.0);
                std::set<std::pair<int, int>> numeric, predicted;
                for (const auto& p : find_local_maxima(amp, thr, true, true))
                    numeric.insert({static_cast<int>(p.row), static_cast<int>(p.col)});
                predicted.insert({pred.target_g, pred.target_q});
                for (const auto& p : pred.peaks)
                    if (p.level >= std::pow(10.0, threshold_db / 20.0)) predicted.insert({p.g, p.q});
                ++cases;
                if (numeric != predicted) ++failed;
            }
        }
    }
    int exception_cases = 0, exception_failed = 0;
    for (Scheme s : {Scheme::A, Scheme::B, Scheme::C, Scheme::D}) {
        const auto c = make_pattern({64, 0, 15e3}, 4, 1, s, 8);
        auto has_edge = [](const PeakPrediction& p) {
            int n = 0;
            for (const auto& sp : p.peaks)
                if (sp.tau_ts == Rational(0) && (sp.fd_t == Rational(1) || sp.fd_t == Rational(-1))) ++n;
            return n;
        };
        const auto ds = predict_side_peaks(c, Algorithm::kDelaySum);
        const auto ff = predict_side_peaks(c, Algorithm::kFft2d);
        ++exception_cases;
        if (!(has_edge(ff) == 2 && has_edge(ds) == 0 && ds.exceptions.size() == 2)) ++exception_failed;
    }
    std::ostringstream d;
    d << cases - failed << "/" << cases << " periodograms with identical bin sets, " << exception_cases - exception_failed
      << "/" << exception_cases << " schemes with the exception set only in fft2d";
    return {failed == 0 && exception_failed == 0, d.str()};
}

// 7. Estimation inside the full-symbol region of Scheme D.
Outcome estimation() {
    constexpr double kNoisyRate = 0.95;
    const auto c = make_pattern({64, 16, 15e3}, 4, 1, Scheme::D, 16);
    const auto x = make_scrambling(c);
    const auto gi = GiSetting::for_config(c, 3);
    const auto region = unambiguity_region(c, {RegionChoice::kFullSymbol});
    const TimeFrame tx = build_frame(c, x);
    const double t = c.numerology.t_sec();
    const double signal_power = energy(tx.samples) / static_cast<double>(tx.samples.size());
    const double noise_power = signal_power / 100.0;  // 20 dB SNR

    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<int> delay_dist(1, 63), bin_dist(-1, 1);
    auto trial = [&](double noise, std::uint64_t seed) {
        const int delay = delay_dist(rng);
        const int q = bin_dist(rng);
        const Target target{delay, q / (16.0 * t), {1.0, 0.0}};
        const auto rx = apply_channel(tx, {target}, noise, DopplerModel::kBlock, seed);
        const auto est = estimate_in_region(rd_map(receive(rx, x, gi)), region, c.numerology);
        return est && est->g == delay && est->q == doppler_bin(c, target.doppler_hz);
    };
    int clean = 0;
    for (int k = 0; k < 20; ++k) clean += trial(0.0, 1000 + k) ? 1 : 0;
    int noisy = 0;
    for (int k = 0; k < 200; ++k) noisy += trial(noise_power, 5000 + k) ? 1 : 0;
    char buf[160];
    std::snprintf(buf, sizeof buf, "noiseless %d/20 (need 20), 20 dB %d/200 = %.1f%% (need >= %.0f%%)", clean, noisy,
                  noisy / 2.0, kNoisyRate * 100);
    return {clean == 20 && noisy >= kNoisyRate * 200, buf};
}

// 8. A rigid comb shift leaves the ambiguity surface unchanged.
Outcome offset_shift() {
    constexpr double kTol = 1e-9;
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> shift(1, 7);
    double worst = 0.0;
    std::string shifts;
    for (int trial = 0; trial < 5; ++trial) {
        const int cshift = shift(rng);
        shifts += (shifts.empty() ? "" : ",") + std::to_string(cshift);
        for (Scheme s : {Scheme::A, Scheme::B, Scheme::C, Scheme::D}) {
            const auto c = make_pattern({64, 8, 15e3}, 8, 2, s, 8, 3);
            const auto x = make_scrambling(c);
            const auto tau = default_tau_grid(c);
            const auto fd = default_fd_grid(c, 128);
            const auto a = compute_af(build_frame(c, x), tau, fd, AfWindow::kPerSymbol);
            const auto moved = shift_offsets(c, x, cshift);
            const auto b = compute_af(build_frame(moved.config, moved.scrambling), tau, fd, AfWindow::kPerSymbol);
            for (std::size_t i = 0; i < a.magnitudes.data().size(); ++i)
                worst = std::max(worst, std::abs(a.magnitudes.data()[i] - b.magnitudes.data()[i]));
        }
    }
    return {worst < kTol, "c = {" + shifts + "}, max cell difference = " + fmt("%.3g (tol %.0e)", worst, kTol)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// 9. Two identical verify runs give identical reports.
Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / ("combrs_acceptance_" + std::to_string(std::random_device{}()));
    fs::create_directories(root);
    int codes[2];
    for (int k = 0; k < 2; ++k) {
        const std::string cmd = std::string("\"") + COMBRS_CLI + "\" verify --config \"" + COMBRS_CONFIG_DIR +
                                "/scheme_d.json\" --out \"" + (root / std::to_string(k)).string() +
                                "\" --seed 7 > /dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        codes[k] = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }
    const std::string a = slurp(root / "0" / "report.json");
    const std::string b = slurp(root / "1" / "report.json");
    fs::remove_all(root);
    const bool same = !a.empty() && a == b;
    std::ostringstream d;
    d << "exit codes " << codes[0] << "," << codes[1] << "; report.json " << a.size() << " bytes, "
      << (same ? "byte-identical" : "differs");
    return {same && codes[0] == 0 && codes[1] == 0, d.str()};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"Scheme D cancellation", scheme_d_cancellation},
        {"predictor/surface agreement", predictor_agreement},
        {"repetition identity", repetition_identity},
        {"extended guard interval exactness", extended_gi},
        {"energy trade-off", energy_tradeoff},
        {"2D-FFT peak formulas", fft2d_formulas},
        {"estimation", estimation},
        {"offset-shift invariance", offset_shift},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
