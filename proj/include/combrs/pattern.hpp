#pragma once

#include "combrs/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace combrs {

// OFDM timing. T_s = 1/SCS is the effective symbol; T = T_s + T_cp.
struct Numerology {
    int n_fft = 64;
    int n_cp = 0;
    double scs_hz = 15e3;

    double t_s_sec() const { return 1.0 / scs_hz; }
    double t_cp_sec() const { return static_cast<double>(n_cp) / n_fft * t_s_sec(); }
    double t_sec() const { return t_s_sec() + t_cp_sec(); }
    int n_prime() const { return n_fft + n_cp; }
    double sample_period_sec() const { return t_s_sec() / n_fft; }

    friend bool operator==(const Numerology&, const Numerology&) = default;
};

enum class Scheme { A, B, C, D };

std::string_view to_string(Scheme s);
Scheme scheme_from_string(std::string_view s);

struct PatternConfig {
    Numerology numerology;
    int s_sub = 4;         // comb size
    int s_sym = 1;         // RS symbol spacing in OFDM symbols
    Scheme scheme = Scheme::A;
    int base_offset = 0;   // f for Schemes A/B
    int slope = 1;         // p for Scheme D
    int m_symbols = 1;     // M
    std::vector<int> offsets;  // F_0 .. F_{M-1}

    int comb_bins() const { return numerology.n_fft / s_sub; }

    friend bool operator==(const PatternConfig&, const PatternConfig&) = default;
};

std::vector<int> make_offsets(Scheme scheme, int s_sub, int m_symbols, int base_offset = 0,
                              int slope = 1);

// Builds a config whose offsets follow the scheme rule. Throws ConfigError if
// the result violates any invariant.
PatternConfig make_pattern(const Numerology& numerology, int s_sub, int s_sym, Scheme scheme,
                           int m_symbols, int base_offset = 0, int slope = 1);

enum class ConfigIssue {
    kNonPositiveFft,
    kNegativeCp,
    kCpNotShorterThanFft,
    kNonPositiveScs,
    kCombTooSmall,
    kSymbolSpacingTooSmall,
    kNoSymbols,
    kFftNotDivisibleByComb,
    kBaseOffsetOutOfRange,
    kSlopeNotCoprime,
    kOddCombForHalfStagger,
    kOffsetsLengthMismatch,
    kOffsetOutOfRange,
};

std::string_view to_string(ConfigIssue issue);

struct ConfigViolation {
    ConfigIssue issue;
    std::string message;
};

std::vector<ConfigViolation> validate_config(const PatternConfig& config);

class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(std::vector<ConfigViolation> violations);
    const std::vector<ConfigViolation>& violations() const { return violations_; }

private:
    std::vector<ConfigViolation> violations_;
};

// Throws ConfigError listing every violation.
void require_valid(const PatternConfig& config);

// x(n) = exp(-j pi u n (n+1) / L), odd L, gcd(u, L) = 1.
CVec zadoff_chu(int length, int root);

// Constant-amplitude zero-autocorrelation sequence of any length: Zadoff-Chu
// for odd lengths, exp(-j pi u n^2 / L) for even lengths.
CVec cazac(int length, int root);

enum class ScramblingKind {
    kCazac,               // exact CAZAC of length n_fft/s_sub
    kZadoffChuExtended,   // largest odd ZC <= n_fft/s_sub, cyclically extended
    kUnit,                // all ones
};

std::string_view to_string(ScramblingKind k);
ScramblingKind scrambling_kind_from_string(std::string_view s);

struct ScramblingOptions {
    ScramblingKind kind = ScramblingKind::kCazac;
    int root = 1;
    bool independent_roots = false;  // per-symbol distinct roots

    friend bool operator==(const ScramblingOptions&, const ScramblingOptions&) = default;
};

// X_i for i = 0..M-1, one unit-modulus entry per occupied RE.
struct ScramblingSequence {
    std::vector<CVec> per_symbol;

    const CVec& values() const { return per_symbol.front(); }
    const CVec& symbol(int i) const { return per_symbol.at(static_cast<std::size_t>(i)); }
};

ScramblingSequence make_scrambling(const PatternConfig& config, const ScramblingOptions& options = {});

struct ShiftedPattern {
    PatternConfig config;
    ScramblingSequence scrambling;
};

// Moves the whole comb up by c subcarriers (cyclically in the N-point band):
// F_i becomes mod(F_i + c, S_sub) and every RE keeps its scrambling value, so
// symbols whose offset wraps have their sequence rotated by one comb index.
ShiftedPattern shift_offsets(const PatternConfig& config, const ScramblingSequence& scrambling, int c);

}  // namespace combrs
