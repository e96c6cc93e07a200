#include "combrs/pattern.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace combrs {

std::string_view to_string(Scheme s) {
    switch (s) {
        case Scheme::A: return "A";
        case Scheme::B: return "B";
        case Scheme::C: return "C";
        case Scheme::D: return "D";
    }
    return "?";
}

Scheme scheme_from_string(std::string_view s) {
    if (s == "A" || s == "a") return Scheme::A;
    if (s == "B" || s == "b") return Scheme::B;
    if (s == "C" || s == "c") return Scheme::C;
    if (s == "D" || s == "d") return Scheme::D;
    throw std::invalid_argument("unknown scheme '" + std::string(s) + "'");
}

std::string_view to_string(ConfigIssue issue) {
    switch (issue) {
        case ConfigIssue::kNonPositiveFft: return "fft size must be positive";
        case ConfigIssue::kNegativeCp: return "cp length must be non-negative";
        case ConfigIssue::kCpNotShorterThanFft: return "cp must be shorter than fft";
        case ConfigIssue::kNonPositiveScs: return "subcarrier spacing must be positive";
        case ConfigIssue::kCombTooSmall: return "comb size must be at least 2";
        case ConfigIssue::kSymbolSpacingTooSmall: return "symbol spacing must be at least 1";
        case ConfigIssue::kNoSymbols: return "at least one RS symbol required";
        case ConfigIssue::kFftNotDivisibleByComb: return "fft size not divisible by comb";
        case ConfigIssue::kBaseOffsetOutOfRange: return "base offset out of range";
        case ConfigIssue::kSlopeNotCoprime: return "slope not coprime";
        case ConfigIssue::kOddCombForHalfStagger: return "half-comb staggering needs even comb";
        case ConfigIssue::kOffsetsLengthMismatch: return "offsets length differs from symbol count";
        case ConfigIssue::kOffsetOutOfRange: return "offset out of range";
    }
    return "unknown";
}

namespace {

std::string describe(const std::vector<ConfigViolation>& v) {
    std::ostringstream os;
    os << "invalid pattern config:";
    for (const auto& e : v) os << "\n  - " << e.message;
    return os.str();
}

ConfigViolation violation(ConfigIssue issue, const std::string& detail = {}) {
    std::string msg(to_string(issue));
    if (!detail.empty()) msg += " (" + detail + ")";
    return {issue, msg};
}

[[noreturn]] void fail(ConfigIssue issue, const std::string& detail = {}) {
    throw ConfigError({violation(issue, detail)});
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigViolation> violations)
    : std::invalid_argument(describe(violations)), violations_(std::move(violations)) {}

std::vector<int> make_offsets(Scheme scheme, int s_sub, int m_symbols, int base_offset, int slope) {
    if (s_sub < 2) fail(ConfigIssue::kCombTooSmall, "s_sub=" + std::to_string(s_sub));
    if (m_symbols < 1) fail(ConfigIssue::kNoSymbols);
    if (base_offset < 0 || base_offset >= s_sub)
        fail(ConfigIssue::kBaseOffsetOutOfRange, "f=" + std::to_string(base_offset));

    std::vector<int> out(static_cast<std::size_t>(m_symbols));
    switch (scheme) {
        case Scheme::A:
            std::fill(out.begin(), out.end(), base_offset);
            break;
        case Scheme::B:
            if (s_sub % 2 != 0) fail(ConfigIssue::kOddCombForHalfStagger, "scheme B");
            for (int i = 0; i < m_symbols; ++i)
                out[i] = (base_offset + (i % 2) * (s_sub / 2)) % s_sub;
            break;
        case Scheme::C: {
            if (s_sub % 2 != 0) fail(ConfigIssue::kOddCombForHalfStagger, "scheme C");
            // Pair each offset with its half-comb partner, then sweep.
            std::vector<int> cycle;
            for (int f = 0; f < s_sub / 2; ++f) {
                cycle.push_back(f);
                cycle.push_back(f + s_sub / 2);
            }
            for (int i = 0; i < m_symbols; ++i) out[i] = cycle[i % s_sub];
            break;
        }
        case Scheme::D:
            if (std::gcd(slope, s_sub) != 1)
                fail(ConfigIssue::kSlopeNotCoprime,
                     "gcd(" + std::to_string(slope) + ", " + std::to_string(s_sub) + ") != 1");
            for (int i = 0; i < m_symbols; ++i) {
                long long v = (static_cast<long long>(slope) * i) % s_sub;
                out[i] = static_cast<int>(v < 0 ? v + s_sub : v);
            }
            break;
    }
    return out;
}

PatternConfig make_pattern(const Numerology& numerology, int s_sub, int s_sym, Scheme scheme,
                           int m_symbols, int base_offset, int slope) {
    PatternConfig c;
    c.numerology = numerology;
    c.s_sub = s_sub;
    c.s_sym = s_sym;
    c.scheme = scheme;
    c.base_offset = base_offset;
    c.slope = slope;
    c.m_symbols = m_symbols;
    c.offsets = make_offsets(scheme, s_sub, m_symbols, base_offset, slope);
    require_valid(c);
    return c;
}

std::vector<ConfigViolation> validate_config(const PatternConfig& c) {
    std::vector<ConfigViolation> v;
    const auto& nm = c.numerology;
    if (nm.n_fft <= 0) v.push_back(violation(ConfigIssue::kNonPositiveFft));
    if (nm.n_cp < 0) v.push_back(violation(ConfigIssue::kNegativeCp));
    if (nm.n_fft > 0 && nm.n_cp >= nm.n_fft) v.push_back(violation(ConfigIssue::kCpNotShorterThanFft));
    if (!(nm.scs_hz > 0.0) || !std::isfinite(nm.scs_hz))
        v.push_back(violation(ConfigIssue::kNonPositiveScs));
    if (c.s_sub < 2) v.push_back(violation(ConfigIssue::kCombTooSmall));
    if (c.s_sym < 1) v.push_back(violation(ConfigIssue::kSymbolSpacingTooSmall));
    if (c.m_symbols < 1) v.push_back(violation(ConfigIssue::kNoSymbols));
    if (c.s_sub >= 2 && nm.n_fft > 0 && nm.n_fft % c.s_sub != 0)
        v.push_back(violation(ConfigIssue::kFftNotDivisibleByComb,
                              std::to_string(nm.n_fft) + " % " + std::to_string(c.s_sub)));
    if (c.s_sub >= 2 && (c.base_offset < 0 || c.base_offset >= c.s_sub))
        v.push_back(violation(ConfigIssue::kBaseOffsetOutOfRange));
    if (c.scheme == Scheme::D && c.s_sub >= 2 && std::gcd(c.slope, c.s_sub) != 1)
        v.push_back(violation(ConfigIssue::kSlopeNotCoprime));
    if ((c.scheme == Scheme::B || c.scheme == Scheme::C) && c.s_sub % 2 != 0)
        v.push_back(violation(ConfigIssue::kOddCombForHalfStagger));
    if (static_cast<int>(c.offsets.size()) != c.m_symbols)
        v.push_back(violation(ConfigIssue::kOffsetsLengthMismatch,
                              std::to_string(c.offsets.size()) + " vs " + std::to_string(c.m_symbols)));
    for (std::size_t i = 0; i < c.offsets.size(); ++i) {
        if (c.offsets[i] < 0 || (c.s_sub >= 2 && c.offsets[i] >= c.s_sub)) {
            v.push_back(violation(ConfigIssue::kOffsetOutOfRange,
                                  "F_" + std::to_string(i) + "=" + std::to_string(c.offsets[i])));
        }
    }
    return v;
}

void require_valid(const PatternConfig& config) {
    auto v = validate_config(config);
    if (!v.empty()) throw ConfigError(std::move(v));
}

CVec zadoff_chu(int length, int root) {
    if (length <= 0 || length % 2 == 0)
        throw std::invalid_argument("zadoff_chu: length must be odd and positive");
    if (std::gcd(root, length) != 1)
        throw std::invalid_argument("zadoff_chu: root must be coprime to length");
    CVec x(static_cast<std::size_t>(length));
    const long long L = length;
    for (long long n = 0; n < L; ++n) {
        // -pi u n(n+1)/L = 2pi * (-u * n(n+1)/2) / L, n(n+1) is even.
        const long long num = -static_cast<long long>(root) * ((n * (n + 1) / 2) % L);
        x[n] = unit_phasor(num, L);
    }
    return x;
}

CVec cazac(int length, int root) {
    if (length <= 0) throw std::invalid_argument("cazac: length must be positive");
    if (length % 2 != 0) return zadoff_chu(length, root);
    if (std::gcd(root, length) != 1)
        throw std::invalid_argument("cazac: root must be coprime to length");
    CVec x(static_cast<std::size_t>(length));
    const long long two_l = 2LL * length;
    for (long long n = 0; n < length; ++n) {
        // -pi u n^2 / L = 2pi * (-u n^2) / (2L)
        const long long num = -static_cast<long long>(root) * ((n * n) % two_l);
        x[n] = unit_phasor(num, two_l);
    }
    return x;
}

std::string_view to_string(ScramblingKind k) {
    switch (k) {
        case ScramblingKind::kCazac: return "cazac";
        case ScramblingKind::kZadoffChuExtended: return "zc_extended";
        case ScramblingKind::kUnit: return "unit";
    }
    return "?";
}

ScramblingKind scrambling_kind_from_string(std::string_view s) {
    if (s == "cazac") return ScramblingKind::kCazac;
    if (s == "zc_extended") return ScramblingKind::kZadoffChuExtended;
    if (s == "unit") return ScramblingKind::kUnit;
    throw std::invalid_argument("unknown scrambling kind '" + std::string(s) + "'");
}

namespace {

// The idx-th root coprime to length, counting from start and cycling
// through [1, length).
int nth_coprime_root(int start, int idx, int length) {
    if (length <= 2) return start;
    if (start < 1) throw std::invalid_argument("scrambling root must be positive");
    int found = -1;
    for (int step = 0; step < length * (idx + 1); ++step) {
        const int r = (start - 1 + step) % (length - 1) + 1;
        if (std::gcd(r, length) == 1 && ++found == idx) return r;
    }
    throw std::invalid_argument("no coprime root available");
}

CVec scrambling_vector(ScramblingKind kind, int bins, int root) {
    switch (kind) {
        case ScramblingKind::kUnit:
            return CVec(static_cast<std::size_t>(bins), cd{1.0, 0.0});
        case ScramblingKind::kCazac:
            return cazac(bins, root);
        case ScramblingKind::kZadoffChuExtended: {
            const int len = bins % 2 == 1 ? bins : bins - 1;
            CVec base = zadoff_chu(len, root);
            CVec out(static_cast<std::size_t>(bins));
            for (int k = 0; k < bins; ++k) out[k] = base[k % len];
            return out;
        }
    }
    return {};
}

int sequence_length(ScramblingKind kind, int bins) {
    if (kind == ScramblingKind::kZadoffChuExtended) return bins % 2 == 1 ? bins : bins - 1;
    return bins;
}

}  // namespace

ScramblingSequence make_scrambling(const PatternConfig& config, const ScramblingOptions& options) {
    require_valid(config);
    const int bins = config.comb_bins();
    ScramblingSequence seq;
    seq.per_symbol.reserve(static_cast<std::size_t>(config.m_symbols));
    if (!options.independent_roots || options.kind == ScramblingKind::kUnit) {
        CVec x = scrambling_vector(options.kind, bins, options.root);
        seq.per_symbol.assign(static_cast<std::size_t>(config.m_symbols), x);
        return seq;
    }
    const int len = sequence_length(options.kind, bins);
    for (int i = 0; i < config.m_symbols; ++i)
        seq.per_symbol.push_back(scrambling_vector(options.kind, bins, nth_coprime_root(options.root, i, len)));
    return seq;
}

ShiftedPattern shift_offsets(const PatternConfig& config, const ScramblingSequence& scrambling, int c) {
    require_valid(config);
    const int s = config.s_sub;
    const int k = config.comb_bins();
    ShiftedPattern out{config, scrambling};
    for (int i = 0; i < config.m_symbols; ++i) {
        const int raw = config.offsets[i] + ((c % s) + s) % s;
        // Whole comb steps that the shift carries past the band edge.
        const int carry = raw / s;
        out.config.offsets[i] = raw % s;
        if (carry == 0) continue;
        const CVec& src = scrambling.symbol(i);
        CVec& dst = out.scrambling.per_symbol.at(static_cast<std::size_t>(i));
        for (int kappa = 0; kappa < k; ++kappa) dst[(kappa + carry) % k] = src[kappa];
    }
    return out;
}

}  // namespace combrs
