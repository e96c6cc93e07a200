#pragma once

// Slow, direct reference implementations used only to check the library.

#include "combrs/pattern.hpp"
#include "combrs/types.hpp"

#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using combrs::cd;
using combrs::CVec;

inline cd expj(double phase) { return {std::cos(phase), std::sin(phase)}; }

// X(k) = sum_n x(n) e^{-j2pi k n / N}
inline CVec dft(const CVec& x) {
    const std::size_t n = x.size();
    CVec out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cd acc{};
        for (std::size_t t = 0; t < n; ++t)
            acc += x[t] * expj(-2.0 * M_PI * static_cast<double>((k * t) % n) / static_cast<double>(n));
        out[k] = acc;
    }
    return out;
}

// Comb synthesis evaluated term by term: one CP-added comb symbol.
inline CVec comb_symbol(const combrs::PatternConfig& c, int f, const CVec& x) {
    const int n = c.numerology.n_fft;
    const int ncp = c.numerology.n_cp;
    CVec z(static_cast<std::size_t>(n + ncp));
    for (int t = 0; t < n + ncp; ++t) {
        cd acc{};
        for (int k = 0; k < c.comb_bins(); ++k) {
            const long long bin = static_cast<long long>(k) * c.s_sub + f;
            const long long e = ((bin * (t - ncp)) % n + n) % n;
            acc += x[k] * expj(2.0 * M_PI * static_cast<double>(e) / n);
        }
        z[t] = acc;
    }
    return z;
}

// |sum_n s(n) s*(n-d) e^{-j2pi f n dt}| / E_s over the windowed index set.
// per_symbol: both samples inside the same [start, start + len) block.
inline double af(const CVec& s, const std::vector<std::size_t>& starts, std::size_t block, long long d, double f_dt,
                 bool per_symbol) {
    double es = 0.0;
    for (const auto& v : s) es += std::norm(v);
    cd acc{};
    const long long len = static_cast<long long>(s.size());
    for (long long n = 0; n < len; ++n) {
        const long long m = n - d;
        if (m < 0 || m >= len) continue;
        if (per_symbol) {
            bool same = false;
            for (std::size_t st : starts) {
                const long long a = static_cast<long long>(st), b = a + static_cast<long long>(block);
                if (n >= a && n < b && m >= a && m < b) same = true;
            }
            if (!same) continue;
        }
        acc += s[n] * std::conj(s[m]) * expj(-2.0 * M_PI * f_dt * static_cast<double>(n));
    }
    return std::abs(acc) / es;
}

}  // namespace oracle
