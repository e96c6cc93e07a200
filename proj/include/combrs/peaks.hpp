#pragma once

#include "combrs/types.hpp"

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

namespace combrs {

// Exact fraction with positive denominator, always reduced.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    constexpr Rational() = default;
    constexpr Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {
        if (den == 0) throw std::invalid_argument("Rational: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
    friend Rational operator-(Rational a, Rational b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
    friend Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
    friend Rational operator/(Rational a, Rational b) { return {a.num * b.den, a.den * b.num}; }
    friend Rational operator-(Rational a) { return {-a.num, a.den}; }
    friend bool operator==(Rational a, Rational b) { return a.num == b.num && a.den == b.den; }
    friend auto operator<=>(Rational a, Rational b) {
        return static_cast<__int128>(a.num) * b.den <=> static_cast<__int128>(b.num) * a.den;
    }
};

std::string to_string(Rational r);

enum class Algorithm { kDelaySum, kFft2d };

std::string_view to_string(Algorithm a);
Algorithm algorithm_from_string(std::string_view s);

// One predicted ambiguity. Positions are kept both in physical units and as
// exact fractions: tau_ts = tau / T_s, fd_t = f_d * T.
struct SidePeak {
    double tau_sec = 0.0;
    double fd_hz = 0.0;
    Rational tau_ts;
    Rational fd_t;
    int delay_index = 0;     // l (delay-and-sum) or z_1 (2D FFT)
    int doppler_index = 0;   // k or z_2
    double level = 0.0;      // predicted magnitude relative to the true peak
    bool major = false;      // level >= 1/sqrt(2)
    int g = -1;              // periodogram bins, -1 when not applicable
    int q = -1;
};

struct PeakPrediction {
    Algorithm algorithm = Algorithm::kDelaySum;
    double target_tau_sec = 0.0;
    double target_fd_hz = 0.0;
    int target_g = -1;
    int target_q = -1;
    std::vector<SidePeak> peaks;
    // (tau_sec, fd_hz) lattice points deliberately left out for this algorithm.
    std::vector<std::pair<double, double>> exceptions;
};

// A sampled surface ready for peak matching. values are linear magnitudes.
struct PeakGrid {
    const Matrix<double>* values = nullptr;
    std::vector<double> row_axis;  // seconds
    std::vector<double> col_axis;  // Hz
    bool wrap_rows = false;
    bool wrap_cols = false;
};

struct GridPeak {
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0.0;
};

// Cells (or equal-valued plateaus, reported once at their first cell in
// row-major order) strictly greater than every other cell in their
// 8-neighbourhood and at least `threshold`.
std::vector<GridPeak> find_local_maxima(const Matrix<double>& values, double threshold, bool wrap_rows = false,
                                        bool wrap_cols = false);

struct UnexpectedPeak {
    double tau_sec = 0.0;
    double fd_hz = 0.0;
    double level_db = 0.0;
};

struct MissingPeak {
    SidePeak peak;
    double surface_level_db = 0.0;
};

struct MatchReport {
    double dynamic_range_db = -13.0;
    std::size_t required = 0;        // predicted peaks at or above the threshold
    std::size_t surface_maxima = 0;  // local maxima above threshold, target excluded
    std::vector<SidePeak> matched;
    std::vector<MissingPeak> missing;
    std::vector<UnexpectedPeak> unexpected;

    bool ok() const { return missing.empty() && unexpected.empty(); }
};

class GridTooCoarse : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

MatchReport match_peaks(const PeakGrid& grid, const PeakPrediction& prediction, double dynamic_range_db);

inline double to_db(double linear) { return linear > 0.0 ? 20.0 * std::log10(linear) : -400.0; }

}  // namespace combrs
