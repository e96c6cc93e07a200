#include "combrs/post_fft.hpp"

#include "combrs/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace combrs {

GiSetting GiSetting::for_config(const PatternConfig& config, int l) {
    require_valid(config);
    if (l < 0 || l >= config.s_sub)
        throw std::out_of_range("guard-interval index l=" + std::to_string(l) + " outside [0, " +
                                std::to_string(config.s_sub) + ")");
    GiSetting s;
    s.l = l;
    s.s_sub = config.s_sub;
    s.numerology = config.numerology;
    return s;
}

int GiSetting::isi_free_delay_samples() const {
    return std::min(numerology.n_cp + l * sub_length(), numerology.n_fft);
}

double GiSetting::isi_free_delay_sec() const {
    return std::min(numerology.t_cp_sec() + l * numerology.t_s_sec() / s_sub, numerology.t_s_sec());
}

namespace {

void check_setting(const GiSetting& s) {
    if (s.s_sub < 1 || s.l < 0 || s.l >= s.s_sub)
        throw std::out_of_range("guard-interval index l=" + std::to_string(s.l) + " outside [0, " +
                                std::to_string(s.s_sub) + ")");
}

}  // namespace

CVec remove_extended_gi(std::span<const cd> symbol_samples, const GiSetting& setting) {
    check_setting(setting);
    const auto np = static_cast<std::size_t>(setting.numerology.n_prime());
    if (symbol_samples.size() != np)
        throw std::invalid_argument("remove_extended_gi: expected " + std::to_string(np) + " samples, got " +
                                    std::to_string(symbol_samples.size()));
    const auto skip = static_cast<std::size_t>(setting.removed_samples());
    return CVec(symbol_samples.begin() + static_cast<std::ptrdiff_t>(skip), symbol_samples.end());
}

CVec derotate_phase(std::span<const cd> g_l, int f_offset, const GiSetting& setting) {
    check_setting(setting);
    if (g_l.size() != static_cast<std::size_t>(setting.kept_samples()))
        throw std::invalid_argument("derotate_phase: length mismatch");
    const long long n = setting.numerology.n_fft;
    const long long start = static_cast<long long>(setting.l) * setting.sub_length();
    CVec out(g_l.size());
    for (std::size_t m = 0; m < g_l.size(); ++m)
        out[m] = g_l[m] * unit_phasor(-static_cast<long long>(f_offset) * (start + static_cast<long long>(m)), n);
    return out;
}

CVec partial_fft(std::span<const cd> g_prime, const GiSetting& setting) {
    check_setting(setting);
    if (g_prime.size() != static_cast<std::size_t>(setting.kept_samples()))
        throw std::invalid_argument("partial_fft: length mismatch");
    CVec b = fft::forward(g_prime);
    const double scale = 1.0 / setting.sub_length();
    for (auto& v : b) v *= scale;
    return b;
}

CVec reassemble(std::span<const cd> b, int f_offset, const GiSetting& setting) {
    check_setting(setting);
    const int k = setting.sub_length();
    const int stride = setting.s_sub - setting.l;
    if (b.size() != static_cast<std::size_t>(stride * k))
        throw std::out_of_range("reassemble: partial spectrum has " + std::to_string(b.size()) + " bins, expected " +
                                std::to_string(stride * k));
    if (f_offset < 0 || f_offset >= setting.s_sub) throw std::out_of_range("reassemble: offset out of range");
    CVec x(static_cast<std::size_t>(setting.numerology.n_fft), cd{});
    for (int w = 0; w < k; ++w) x[w * setting.s_sub + f_offset] = b[static_cast<std::size_t>(stride * w)];
    return x;
}

ReassembledGrid descramble(const std::vector<CVec>& x_prime_stack, const PatternConfig& config,
                           const GiSetting& setting, const ScramblingSequence& scrambling) {
    if (static_cast<int>(x_prime_stack.size()) != config.m_symbols ||
        static_cast<int>(scrambling.per_symbol.size()) != config.m_symbols)
        throw std::invalid_argument("descramble: symbol count mismatch");
    ReassembledGrid grid;
    grid.config = config;
    grid.setting = setting;
    grid.reassembled = x_prime_stack;
    const int n = config.numerology.n_fft;
    for (int i = 0; i < config.m_symbols; ++i) {
        const CVec& xp = x_prime_stack[i];
        const CVec& xi = scrambling.symbol(i);
        if (static_cast<int>(xp.size()) != n || static_cast<int>(xi.size()) != config.comb_bins())
            throw std::invalid_argument("descramble: vector length mismatch");
        CVec xr(static_cast<std::size_t>(n), cd{});
        const int f = config.offsets[i];
        for (int w = 0; w < config.comb_bins(); ++w) {
            const int bin = w * config.s_sub + f;
            xr[bin] = xp[bin] * std::conj(xi[w]);
        }
        grid.descrambled.push_back(std::move(xr));
    }
    return grid;
}

ReassembledGrid receive(const TimeFrame& frame, const ScramblingSequence& scrambling, const GiSetting& setting) {
    const PatternConfig& config = frame.config;
    const std::size_t np = static_cast<std::size_t>(config.numerology.n_prime());
    std::vector<CVec> stack;
    for (int i = 0; i < config.m_symbols; ++i) {
        const std::size_t start = frame.symbol_starts.at(static_cast<std::size_t>(i));
        if (start + np > frame.samples.size()) throw std::out_of_range("receive: symbol past end of frame");
        const std::span<const cd> sym(frame.samples.data() + start, np);
        const int f = config.offsets[i];
        const CVec g = remove_extended_gi(sym, setting);
        const CVec gp = derotate_phase(g, f, setting);
        stack.push_back(reassemble(partial_fft(gp, setting), f, setting));
    }
    return descramble(stack, config, setting, scrambling);
}

std::vector<CVec> expected_reassembled(const PatternConfig& config, const GiSetting& setting,
                                       const ScramblingSequence& scrambling, const Target& target) {
    const auto& nm = config.numerology;
    const int n = nm.n_fft;
    std::vector<CVec> out;
    for (int i = 0; i < config.m_symbols; ++i) {
        CVec x(static_cast<std::size_t>(n), cd{});
        const cd doppler = std::polar(1.0, kTwoPi * target.doppler_hz * i * nm.t_sec() * config.s_sym);
        const cd common = static_cast<double>(setting.s_sub - setting.l) * target.amplitude * doppler;
        for (int w = 0; w < config.comb_bins(); ++w) {
            const int bin = w * config.s_sub + config.offsets[i];
            x[bin] = common * scrambling.symbol(i)[w] *
                     unit_phasor(-static_cast<long long>(target.delay_samples) * bin, n);
        }
        out.push_back(std::move(x));
    }
    return out;
}

double closed_form_residual(const ReassembledGrid& grid, const ScramblingSequence& scrambling, const Target& target) {
    const auto expected = expected_reassembled(grid.config, grid.setting, scrambling, target);
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        for (std::size_t k = 0; k < expected[i].size(); ++k) {
            err = std::max(err, std::abs(grid.reassembled.at(i).at(k) - expected[i][k]));
            ref = std::max(ref, std::abs(expected[i][k]));
        }
    }
    return ref > 0.0 ? err / ref : err;
}

RangeDopplerMap rd_map(const ReassembledGrid& grid) {
    const PatternConfig& config = grid.config;
    const int n = config.numerology.n_fft;
    const int m = config.m_symbols;
    if (static_cast<int>(grid.descrambled.size()) != m) throw std::invalid_argument("rd_map: expected M symbols");
    for (const auto& row : grid.descrambled)
        if (static_cast<int>(row.size()) != n) throw std::invalid_argument("rd_map: expected N bins per symbol");

    // Doppler stage: exponent e^{-j2pi q i S_sym / M} is DFT bin (q S_sym mod M).
    Matrix<cd> doppler(static_cast<std::size_t>(n), static_cast<std::size_t>(m));
    CVec column(static_cast<std::size_t>(m));
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < m; ++i) column[i] = grid.descrambled[i][k];
        const CVec spec = fft::forward(column);
        for (int q = 0; q < m; ++q)
            doppler(k, q) = spec[static_cast<std::size_t>((static_cast<long long>(q) * config.s_sym) % m)];
    }

    RangeDopplerMap map;
    map.n_fft = n;
    map.m_symbols = m;
    map.values = Matrix<double>(static_cast<std::size_t>(n), static_cast<std::size_t>(m));
    CVec bins(static_cast<std::size_t>(n));
    for (int q = 0; q < m; ++q) {
        for (int k = 0; k < n; ++k) bins[k] = doppler(k, q);
        const CVec delay = fft::backward(bins);  // e^{+j2pi g k / N}
        for (int g = 0; g < n; ++g) map.values(g, q) = std::norm(delay[g]);
    }

    const auto& nm = config.numerology;
    for (int g = 0; g < n; ++g) map.tau_axis_sec.push_back(g * nm.t_s_sec() / n);
    for (int q = 0; q < m; ++q) {
        const int sq = RangeDopplerMap::signed_bin(q, m);
        map.fd_axis_hz.push_back(sq / (m * nm.t_sec()));
        map.fd_axis_physical_hz.push_back(sq / (m * config.s_sym * nm.t_sec()));
    }
    return map;
}

BinEstimate argmax(const RangeDopplerMap& map) {
    BinEstimate best{0, 0, -1.0};
    for (std::size_t g = 0; g < map.values.rows(); ++g)
        for (std::size_t q = 0; q < map.values.cols(); ++q)
            if (map.values(g, q) > best.value) best = {static_cast<int>(g), static_cast<int>(q), map.values(g, q)};
    return best;
}

std::optional<BinEstimate> estimate_in_region(const RangeDopplerMap& map, const UnambiguityRegion& region,
                                              const Numerology& numerology) {
    std::optional<BinEstimate> best;
    for (std::size_t g = 0; g < map.values.rows(); ++g) {
        for (std::size_t q = 0; q < map.values.cols(); ++q) {
            if (!region.contains(numerology, map.tau_axis_sec[g], map.fd_axis_hz[q])) continue;
            if (!best || map.values(g, q) > best->value)
                best = BinEstimate{static_cast<int>(g), static_cast<int>(q), map.values(g, q)};
        }
    }
    return best;
}

int doppler_bin(const PatternConfig& config, double fd_hz) {
    const int m = config.m_symbols;
    const long long q = std::llround(fd_hz * m * config.numerology.t_sec());
    return static_cast<int>(((q % m) + m) % m);
}

namespace {

// |sum_i e^{j2pi i S_sym (f* T - q/M)} e^{j2pi z1 F_i / S_sub}|
double doppler_sum(const PatternConfig& config, int z1, double fd_t, int q) {
    const int m = config.m_symbols;
    cd acc{};
    for (int i = 0; i < m; ++i) {
        const double phase = kTwoPi * (static_cast<double>(i) * config.s_sym * (fd_t - static_cast<double>(q) / m) +
                                       static_cast<double>((static_cast<long long>(z1) * config.offsets[i]) %
                                                           config.s_sub) / config.s_sub);
        acc += std::polar(1.0, phase);
    }
    return std::abs(acc);
}

// Closed-form Doppler bins for Schemes A and D, or nullopt when the lattice
// does not land on integer bins.
std::optional<std::vector<int>> closed_form_bins(const PatternConfig& config, int z1, double fd_t) {
    const int m = config.m_symbols;
    const double shift = config.scheme == Scheme::D
                             ? static_cast<double>(z1) * config.slope * m / (config.s_sub * config.s_sym)
                             : 0.0;
    std::vector<int> out;
    for (int z2 = -config.s_sym; z2 <= config.s_sym; ++z2) {
        const double q = m * fd_t + shift - static_cast<double>(z2) * m / config.s_sym;
        const double r = std::round(q);
        if (std::abs(q - r) > 1e-9) return std::nullopt;
        const int b = static_cast<int>(((static_cast<long long>(r) % m) + m) % m);
        if (std::find(out.begin(), out.end(), b) == out.end()) out.push_back(b);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

PeakPrediction predict_2dfft_peaks(const PatternConfig& config, const GiSetting& setting, const Target& target) {
    require_valid(config);
    check_setting(setting);
    const auto& nm = config.numerology;
    const int n = nm.n_fft;
    const int m = config.m_symbols;
    const int k = n / config.s_sub;
    const double fd_t = target.doppler_hz * nm.t_sec();

    PeakPrediction pred;
    pred.algorithm = Algorithm::kFft2d;
    pred.target_g = ((target.delay_samples % n) + n) % n;
    pred.target_q = doppler_bin(config, target.doppler_hz);
    pred.target_tau_sec = pred.target_g * nm.t_s_sec() / n;
    pred.target_fd_hz = RangeDopplerMap::signed_bin(pred.target_q, m) / (m * nm.t_sec());

    for (int z1 = 0; z1 < config.s_sub; ++z1) {
        const int g = (pred.target_g + z1 * k) % n;
        std::vector<int> bins;
        std::optional<std::vector<int>> closed;
        if (config.scheme == Scheme::A || config.scheme == Scheme::D) closed = closed_form_bins(config, z1, fd_t);
        if (closed) {
            bins = *closed;
        } else {
            // Schemes B/C (or off-bin Doppler): evaluate the Doppler sum per bin.
            for (int q = 0; q < m; ++q)
                if (doppler_sum(config, z1, fd_t, q) > 1e-9 * m) bins.push_back(q);
        }
        for (int q : bins) {
            if (z1 == 0 && q == pred.target_q) continue;
            const double level = doppler_sum(config, z1, fd_t, q) / m;
            if (level <= 1e-9) continue;
            const int sq = RangeDopplerMap::signed_bin(q, m);
            SidePeak p;
            p.g = g;
            p.q = q;
            p.tau_sec = g * nm.t_s_sec() / n;
            p.fd_hz = sq / (m * nm.t_sec());
            p.tau_ts = Rational(g, n);
            p.fd_t = Rational(sq, m);
            p.delay_index = z1;
            p.doppler_index = sq - RangeDopplerMap::signed_bin(pred.target_q, m);
            p.level = level;
            p.major = level >= std::numbers::sqrt2 / 2.0 - 1e-12;
            pred.peaks.push_back(p);
        }
    }
    return pred;
}

MatchReport verify_prediction(const RangeDopplerMap& map, const PeakPrediction& prediction, double dynamic_range_db) {
    Matrix<double> amplitude(map.values.rows(), map.values.cols());
    for (std::size_t i = 0; i < amplitude.data().size(); ++i) amplitude.data()[i] = std::sqrt(map.values.data()[i]);
    PeakGrid grid;
    grid.values = &amplitude;
    grid.row_axis = map.tau_axis_sec;
    grid.col_axis = map.fd_axis_hz;
    grid.wrap_rows = true;
    grid.wrap_cols = true;
    return match_peaks(grid, prediction, dynamic_range_db);
}

}  // namespace combrs
