#include "combrs/delay_sum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace combrs {

std::string_view to_string(AfWindow w) {
    return w == AfWindow::kPerSymbol ? "per_symbol" : "full_frame";
}

AfWindow af_window_from_string(std::string_view s) {
    if (s == "per_symbol") return AfWindow::kPerSymbol;
    if (s == "full_frame") return AfWindow::kFullFrame;
    throw std::invalid_argument("unknown AF window '" + std::string(s) + "'");
}

namespace {

std::vector<long long> delays_in_samples(const std::vector<double>& tau_grid_sec, double dt, std::size_t len) {
    std::vector<long long> out;
    out.reserve(tau_grid_sec.size());
    for (double tau : tau_grid_sec) {
        const double x = tau / dt;
        const double r = std::round(x);
        if (std::abs(x - r) > 1e-6) {
            throw OffGridDelay("delay " + std::to_string(tau) + " s is not a multiple of the sample period");
        }
        if (std::abs(r) >= static_cast<double>(len))
            throw OffGridDelay("delay " + std::to_string(tau) + " s exceeds the frame length");
        out.push_back(static_cast<long long>(r));
    }
    return out;
}

// Dense lag product r(n) = s(n) s*(n-d), zero where the window excludes n.
CVec lag_product(const TimeFrame& frame, long long d, AfWindow window) {
    const auto& s = frame.samples;
    const long long len = static_cast<long long>(s.size());
    CVec r(s.size(), cd{});
    auto accumulate_span = [&](long long lo, long long hi) {
        for (long long n = std::max(lo, lo + d); n < std::min(hi, hi + d); ++n) r[n] = s[n] * std::conj(s[n - d]);
    };
    if (window == AfWindow::kFullFrame) {
        accumulate_span(0, len);
    } else {
        const long long np = frame.config.numerology.n_prime();
        for (std::size_t st : frame.symbol_starts) accumulate_span(static_cast<long long>(st), static_cast<long long>(st) + np);
    }
    return r;
}

}  // namespace

AfSurface compute_af(const TimeFrame& frame, const std::vector<double>& tau_grid_sec,
                     const std::vector<double>& fd_grid_hz, AfWindow window, unsigned threads) {
    if (frame.samples.empty()) throw std::invalid_argument("compute_af: empty frame");
    const double dt = frame.sample_period_sec;
    const auto delays = delays_in_samples(tau_grid_sec, dt, frame.samples.size());

    AfSurface out;
    out.tau_axis_sec = tau_grid_sec;
    out.fd_axis_hz = fd_grid_hz;
    out.magnitudes = Matrix<double>(tau_grid_sec.size(), fd_grid_hz.size());
    out.normalization_energy = energy(frame.samples);
    if (out.normalization_energy <= 0.0) throw std::invalid_argument("compute_af: zero-energy frame");

    std::vector<CVec> products;
    products.reserve(delays.size());
    for (long long d : delays) products.push_back(lag_product(frame, d, window));

    // Active sample range per delay keeps the inner loop short for sparse frames.
    std::vector<std::pair<std::size_t, std::size_t>> active(delays.size());
    for (std::size_t a = 0; a < products.size(); ++a) {
        const auto& r = products[a];
        std::size_t lo = 0, hi = r.size();
        while (lo < hi && r[lo] == cd{}) ++lo;
        while (hi > lo && r[hi - 1] == cd{}) --hi;
        active[a] = {lo, hi};
    }

    const std::size_t len = frame.samples.size();
    const double es = out.normalization_energy;
    auto work = [&](std::size_t col_begin, std::size_t col_end) {
        CVec phasor(len);
        for (std::size_t c = col_begin; c < col_end; ++c) {
            const double w = -kTwoPi * fd_grid_hz[c] * dt;
            for (std::size_t n = 0; n < len; ++n) phasor[n] = std::polar(1.0, w * static_cast<double>(n));
            for (std::size_t a = 0; a < products.size(); ++a) {
                const auto& r = products[a];
                cd acc{};
                for (std::size_t n = active[a].first; n < active[a].second; ++n) acc += r[n] * phasor[n];
                out.magnitudes(a, c) = std::abs(acc) / es;
            }
        }
    };

    const std::size_t cols = fd_grid_hz.size();
    unsigned n_threads = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, std::max<std::size_t>(cols, 1)));
    if (n_threads <= 1) {
        work(0, cols);
        return out;
    }
    {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (cols + n_threads - 1) / n_threads;
        for (unsigned t = 0; t < n_threads; ++t) {
            const std::size_t b = t * chunk;
            const std::size_t e = std::min(cols, b + chunk);
            if (b >= e) break;
            pool.emplace_back(work, b, e);
        }
    }
    return out;
}

std::vector<double> default_tau_grid(const PatternConfig& config, int points) {
    const int n = points > 0 ? points : config.numerology.n_fft;
    const double dt = config.numerology.sample_period_sec();
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) g[k] = k * dt;
    return g;
}

std::vector<double> default_fd_grid(const PatternConfig& config, int points) {
    const double t = config.numerology.t_sec();
    const int np = config.numerology.n_prime();
    const double span = np / t;
    const double start = -0.5 * span;
    const long long n = points > 0 ? points : 8LL * config.m_symbols * np;
    std::vector<double> g(static_cast<std::size_t>(n));
    for (long long k = 0; k < n; ++k) g[k] = start + span * static_cast<double>(k) / static_cast<double>(n);
    return g;
}

std::vector<double> verification_fd_grid(const PatternConfig& config) {
    const double t = config.numerology.t_sec();
    const int bins = config.m_symbols * config.s_sym;
    std::vector<double> g;
    for (int m = -bins; m <= bins; ++m) g.push_back(static_cast<double>(m) / (bins * t));
    return g;
}

double staggering_factor(const PatternConfig& config, int l, double fd_t) {
    cd acc{};
    for (int i = 0; i < config.m_symbols; ++i) {
        const double phase = kTwoPi * (static_cast<double>(config.offsets[i] * l % config.s_sub) / config.s_sub -
                                       fd_t * i * config.s_sym);
        acc += std::polar(1.0, phase);
    }
    return std::abs(acc) / config.m_symbols;
}

double predicted_af_level(const PatternConfig& config, int l, double fd_hz) {
    const auto& nm = config.numerology;
    const int d = l * nm.n_fft / config.s_sub;
    const int span = nm.n_prime() - d;
    if (span <= 0) return 0.0;
    const double x = std::numbers::pi * fd_hz * nm.sample_period_sec();
    const double den = std::sin(x);
    const double inner = std::abs(den) < 1e-15 ? span : std::abs(std::sin(x * span) / den);
    return staggering_factor(config, l, fd_hz * nm.t_sec()) * inner / nm.n_prime();
}

PeakPrediction predict_side_peaks(const PatternConfig& config, Algorithm algorithm) {
    require_valid(config);
    const auto& nm = config.numerology;
    const double t = nm.t_sec();
    const double ts = nm.t_s_sec();
    const int s_sub = config.s_sub;
    const int s_sym = config.s_sym;

    PeakPrediction pred;
    pred.algorithm = algorithm;

    for (int l = 0; l <= s_sub; ++l) {
        // Offset of the Doppler lattice at this delay, in units of 1/(S_sym T).
        std::vector<Rational> bases;
        switch (config.scheme) {
            case Scheme::A: bases.emplace_back(0); break;
            case Scheme::B: bases.emplace_back(l % 2 == 1 ? Rational(1, 2) : Rational(0)); break;
            case Scheme::D: bases.emplace_back(static_cast<std::int64_t>(config.slope) * l, s_sub); break;
            case Scheme::C:
                // No closed form: keep the fractional lattice points where the
                // staggering sum does not cancel.
                for (int j = 0; j < s_sub; ++j) {
                    const Rational frac(j, s_sub);
                    if (staggering_factor(config, l, frac.value() / s_sym) > 1e-9) bases.push_back(frac);
                }
                break;
        }
        for (const Rational& base : bases) {
            for (int k = -s_sym; k <= s_sym; ++k) {
                const Rational v = base + Rational(k);
                const Rational fd_t = v / Rational(s_sym);
                if (l == 0 && v == Rational(0)) continue;
                const double fd_hz = fd_t.value() / t;
                const double tau = static_cast<double>(l) * ts / s_sub;
                if (algorithm == Algorithm::kDelaySum && l == 0 && (fd_t == Rational(1) || fd_t == Rational(-1))) {
                    pred.exceptions.emplace_back(tau, fd_hz);
                    continue;
                }
                const bool dup = std::any_of(pred.peaks.begin(), pred.peaks.end(), [&](const SidePeak& p) {
                    return p.delay_index == l && p.fd_t == fd_t;
                });
                if (dup) continue;

                SidePeak p;
                p.tau_sec = tau;
                p.fd_hz = fd_hz;
                p.tau_ts = Rational(l, s_sub);
                p.fd_t = fd_t;
                p.delay_index = l;
                p.doppler_index = k;
                p.level = algorithm == Algorithm::kDelaySum ? predicted_af_level(config, l, fd_hz)
                                                            : staggering_factor(config, l, fd_t.value());
                p.major = p.level >= std::numbers::sqrt2 / 2.0 - 1e-12;
                pred.peaks.push_back(p);
            }
        }
    }
    return pred;
}

MatchReport verify_prediction(const AfSurface& surface, const PeakPrediction& prediction, double dynamic_range_db) {
    PeakGrid grid;
    grid.values = &surface.magnitudes;
    grid.row_axis = surface.tau_axis_sec;
    grid.col_axis = surface.fd_axis_hz;
    return match_peaks(grid, prediction, dynamic_range_db);
}

}  // namespace combrs
