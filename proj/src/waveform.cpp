#include "combrs/waveform.hpp"

#include "combrs/fft.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <random>

namespace combrs {

CVec modulate_symbol(const PatternConfig& config, int symbol_index, const ScramblingSequence& scrambling) {
    require_valid(config);
    if (symbol_index < 0 || symbol_index >= config.m_symbols)
        throw std::out_of_range("modulate_symbol: symbol index out of range");
    if (static_cast<int>(scrambling.per_symbol.size()) != config.m_symbols)
        throw std::invalid_argument("modulate_symbol: scrambling has wrong symbol count");
    const CVec& x = scrambling.symbol(symbol_index);
    const int n = config.numerology.n_fft;
    const int ncp = config.numerology.n_cp;
    const int bins = config.comb_bins();
    if (static_cast<int>(x.size()) != bins)
        throw std::invalid_argument("modulate_symbol: scrambling length mismatch (expected " +
                                    std::to_string(bins) + ", got " + std::to_string(x.size()) + ")");

    CVec grid(static_cast<std::size_t>(n), cd{});
    const int offset = config.offsets[symbol_index];
    for (int k = 0; k < bins; ++k) grid[k * config.s_sub + offset] = x[k];
    const CVec y = fft::backward(grid);

    CVec z(static_cast<std::size_t>(n + ncp));
    for (int i = 0; i < n + ncp; ++i) z[i] = y[((i - ncp) % n + n) % n];
    return z;
}

TimeFrame build_frame(const PatternConfig& config, const ScramblingSequence& scrambling) {
    require_valid(config);
    const std::size_t np = static_cast<std::size_t>(config.numerology.n_prime());
    const std::size_t stride = static_cast<std::size_t>(config.s_sym) * np;
    const std::size_t m = static_cast<std::size_t>(config.m_symbols);

    TimeFrame frame;
    frame.config = config;
    frame.sample_period_sec = config.numerology.sample_period_sec();
    frame.samples.assign((m - 1) * stride + np, cd{});
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t start = i * stride;
        frame.symbol_starts.push_back(start);
        const CVec z = modulate_symbol(config, static_cast<int>(i), scrambling);
        std::copy(z.begin(), z.end(), frame.samples.begin() + static_cast<std::ptrdiff_t>(start));
    }
    return frame;
}

std::string_view to_string(DopplerModel m) {
    return m == DopplerModel::kRamp ? "ramp" : "block";
}

DopplerModel doppler_model_from_string(std::string_view s) {
    if (s == "ramp") return DopplerModel::kRamp;
    if (s == "block") return DopplerModel::kBlock;
    throw std::invalid_argument("unknown doppler model '" + std::string(s) + "'");
}

std::vector<std::string> doppler_warnings(const std::vector<Target>& targets, const Numerology& numerology) {
    std::vector<std::string> out;
    const double limit = numerology.scs_hz / 10.0;
    for (std::size_t t = 0; t < targets.size(); ++t) {
        if (std::abs(targets[t].doppler_hz) > limit) {
            out.push_back("target " + std::to_string(t) + ": |doppler| " +
                          std::to_string(std::abs(targets[t].doppler_hz)) + " Hz exceeds SCS/10 = " +
                          std::to_string(limit) + " Hz");
        }
    }
    return out;
}

TimeFrame apply_channel(const TimeFrame& frame, const std::vector<Target>& targets, double noise_power,
                        DopplerModel model, std::uint64_t seed) {
    const std::size_t len = frame.samples.size();
    if (noise_power < 0.0) throw std::invalid_argument("apply_channel: negative noise power");
    for (const auto& t : targets) {
        if (t.delay_samples < 0 || static_cast<std::size_t>(t.delay_samples) >= len)
            throw std::out_of_range("apply_channel: delay " + std::to_string(t.delay_samples) +
                                    " outside frame of " + std::to_string(len) + " samples");
    }

    TimeFrame out = frame;
    std::fill(out.samples.begin(), out.samples.end(), cd{});
    const double dt = frame.sample_period_sec;
    const auto& cfg = frame.config;
    const std::size_t stride = static_cast<std::size_t>(cfg.s_sym) * cfg.numerology.n_prime();
    const double symbol_time = cfg.s_sym * cfg.numerology.t_sec();

    for (const auto& t : targets) {
        const std::size_t d = static_cast<std::size_t>(t.delay_samples);
        for (std::size_t n = d; n < len; ++n) {
            const std::size_t src = n - d;
            double phase = 0.0;
            if (model == DopplerModel::kRamp) {
                phase = kTwoPi * t.doppler_hz * static_cast<double>(n) * dt;
            } else {
                const std::size_t i = src / stride;
                phase = kTwoPi * t.doppler_hz * static_cast<double>(i) * symbol_time;
            }
            out.samples[n] += t.amplitude * frame.samples[src] * std::polar(1.0, phase);
        }
    }

    if (noise_power > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, std::sqrt(noise_power / 2.0));
        for (auto& s : out.samples) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            s += cd{re, im};
        }
    }
    return out;
}

double energy(std::span<const cd> x) {
    double e = 0.0;
    for (const auto& v : x) e += std::norm(v);
    return e;
}

namespace {

void put_f64le(std::vector<std::uint8_t>& out, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
}

double get_f64le(const std::uint8_t* p) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(p[b]) << (8 * b);
    return std::bit_cast<double>(bits);
}

}  // namespace

std::vector<std::uint8_t> encode_samples_f64le(std::span<const cd> samples) {
    std::vector<std::uint8_t> out;
    out.reserve(samples.size() * 16);
    for (const auto& s : samples) {
        put_f64le(out, s.real());
        put_f64le(out, s.imag());
    }
    return out;
}

CVec decode_samples_f64le(std::span<const std::uint8_t> bytes) {
    if (bytes.size() % 16 != 0) throw std::invalid_argument("sample dump length is not a multiple of 16");
    CVec out(bytes.size() / 16);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = {get_f64le(bytes.data() + 16 * i), get_f64le(bytes.data() + 16 * i + 8)};
    return out;
}

}  // namespace combrs
