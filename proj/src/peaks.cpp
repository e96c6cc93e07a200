#include "combrs/peaks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>

namespace combrs {

std::string to_string(Rational r) {
    if (r.den == 1) return std::to_string(r.num);
    return std::to_string(r.num) + "/" + std::to_string(r.den);
}

std::string_view to_string(Algorithm a) {
    return a == Algorithm::kDelaySum ? "delay_sum" : "fft2d";
}

Algorithm algorithm_from_string(std::string_view s) {
    if (s == "delay_sum") return Algorithm::kDelaySum;
    if (s == "fft2d") return Algorithm::kFft2d;
    throw std::invalid_argument("unknown algorithm '" + std::string(s) + "'");
}

namespace {

struct Neighbourhood {
    std::size_t rows, cols;
    bool wrap_r, wrap_c;

    // Calls fn(r, c) for each distinct neighbour of (r0, c0).
    template <typename Fn>
    void for_each(std::size_t r0, std::size_t c0, Fn&& fn) const {
        for (int dr = -1; dr <= 1; ++dr) {
            for (int dc = -1; dc <= 1; ++dc) {
                if (dr == 0 && dc == 0) continue;
                auto r = step(r0, dr, rows, wrap_r);
                auto c = step(c0, dc, cols, wrap_c);
                if (!r || !c) continue;
                if (*r == r0 && *c == c0) continue;
                fn(*r, *c);
            }
        }
    }

    static std::optional<std::size_t> step(std::size_t i, int d, std::size_t n, bool wrap) {
        const long long v = static_cast<long long>(i) + d;
        if (wrap) return static_cast<std::size_t>(((v % static_cast<long long>(n)) + n) % n);
        if (v < 0 || v >= static_cast<long long>(n)) return std::nullopt;
        return static_cast<std::size_t>(v);
    }
};

std::size_t axis_distance(std::size_t a, std::size_t b, std::size_t n, bool wrap) {
    std::size_t d = a > b ? a - b : b - a;
    if (wrap) d = std::min(d, n - d);
    return d;
}

std::optional<std::size_t> nearest_index(const std::vector<double>& axis, double v) {
    if (axis.empty()) return std::nullopt;
    if (axis.size() == 1) return std::abs(v - axis[0]) < 1e-12 * std::max(1.0, std::abs(v)) ? std::optional<std::size_t>(0) : std::nullopt;
    const double lo_half = 0.5 * std::abs(axis[1] - axis[0]);
    const double hi_half = 0.5 * std::abs(axis[axis.size() - 1] - axis[axis.size() - 2]);
    const double lo = std::min(axis.front(), axis.back());
    const double hi = std::max(axis.front(), axis.back());
    const double eps = 1e-9 * std::max(lo_half, hi_half);
    if (v < lo - lo_half - eps || v > hi + hi_half + eps) return std::nullopt;
    std::size_t best = 0;
    double best_d = std::abs(axis[0] - v);
    for (std::size_t i = 1; i < axis.size(); ++i) {
        const double d = std::abs(axis[i] - v);
        if (d < best_d) {
            best = i;
            best_d = d;
        }
    }
    return best;
}

}  // namespace

std::vector<GridPeak> find_local_maxima(const Matrix<double>& values, double threshold, bool wrap_rows,
                                        bool wrap_cols) {
    const std::size_t rows = values.rows();
    const std::size_t cols = values.cols();
    std::vector<GridPeak> out;
    if (values.empty()) return out;

    double vmax = 0.0;
    for (double v : values.data()) vmax = std::max(vmax, std::abs(v));
    const double tol = 1e-12 * vmax;
    const Neighbourhood nb{rows, cols, wrap_rows, wrap_cols};

    std::vector<char> visited(rows * cols, 0);
    std::vector<std::pair<std::size_t, std::size_t>> plateau;
    std::vector<std::pair<std::size_t, std::size_t>> frontier;

    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (visited[r * cols + c]) continue;
            const double v = values(r, c);
            if (v < threshold) continue;

            plateau.clear();
            frontier.assign(1, {r, c});
            visited[r * cols + c] = 1;
            bool is_max = true;
            while (!frontier.empty()) {
                auto [pr, pc] = frontier.back();
                frontier.pop_back();
                plateau.emplace_back(pr, pc);
                nb.for_each(pr, pc, [&](std::size_t nr, std::size_t nc) {
                    const double w = values(nr, nc);
                    if (std::abs(w - v) <= tol) {
                        if (!visited[nr * cols + nc]) {
                            visited[nr * cols + nc] = 1;
                            frontier.emplace_back(nr, nc);
                        }
                    } else if (w > v) {
                        is_max = false;
                    }
                });
            }
            if (is_max) {
                auto first = *std::min_element(plateau.begin(), plateau.end());
                out.push_back({first.first, first.second, v});
            }
        }
    }
    return out;
}

MatchReport match_peaks(const PeakGrid& grid, const PeakPrediction& prediction, double dynamic_range_db) {
    if (grid.values == nullptr) throw std::invalid_argument("match_peaks: empty grid");
    const Matrix<double>& values = *grid.values;
    const std::size_t rows = values.rows();
    const std::size_t cols = values.cols();
    if (rows != grid.row_axis.size() || cols != grid.col_axis.size())
        throw std::invalid_argument("match_peaks: axis sizes do not match the value matrix");

    MatchReport report;
    report.dynamic_range_db = dynamic_range_db;

    auto locate = [&](double tau, double fd, int g, int q) -> std::optional<std::pair<std::size_t, std::size_t>> {
        if (g >= 0 && q >= 0) {
            if (static_cast<std::size_t>(g) >= rows || static_cast<std::size_t>(q) >= cols) return std::nullopt;
            return std::make_pair(static_cast<std::size_t>(g), static_cast<std::size_t>(q));
        }
        auto r = nearest_index(grid.row_axis, tau);
        auto c = nearest_index(grid.col_axis, fd);
        if (!r || !c) return std::nullopt;
        return std::make_pair(*r, *c);
    };
    auto chebyshev = [&](std::pair<std::size_t, std::size_t> a, std::pair<std::size_t, std::size_t> b) {
        return std::max(axis_distance(a.first, b.first, rows, grid.wrap_rows),
                        axis_distance(a.second, b.second, cols, grid.wrap_cols));
    };

    const auto target = locate(prediction.target_tau_sec, prediction.target_fd_hz, prediction.target_g,
                               prediction.target_q);

    struct Located {
        const SidePeak* peak;
        std::pair<std::size_t, std::size_t> cell;
    };
    std::vector<Located> in_grid;
    for (const auto& p : prediction.peaks) {
        if (auto cell = locate(p.tau_sec, p.fd_hz, p.g, p.q)) in_grid.push_back({&p, *cell});
    }

    // Adjacent predictions would make "within one cell" ambiguous.
    for (std::size_t a = 0; a < in_grid.size(); ++a) {
        if (target && chebyshev(in_grid[a].cell, *target) < 2)
            throw GridTooCoarse("grid too coarse: predicted peak within one cell of the target");
        for (std::size_t b = a + 1; b < in_grid.size(); ++b) {
            if (chebyshev(in_grid[a].cell, in_grid[b].cell) < 2)
                throw GridTooCoarse("grid too coarse: predicted peaks closer than two cells");
        }
    }

    double ref = 0.0;
    for (double v : values.data()) ref = std::max(ref, v);
    const double rel_threshold = std::pow(10.0, dynamic_range_db / 20.0);
    const double threshold = ref * rel_threshold;

    std::vector<GridPeak> maxima;
    for (const auto& m : find_local_maxima(values, threshold, grid.wrap_rows, grid.wrap_cols)) {
        if (target && chebyshev({m.row, m.col}, *target) <= 1) continue;
        maxima.push_back(m);
    }
    report.surface_maxima = maxima.size();

    auto rel_db = [&](double v) { return ref > 0.0 ? to_db(v / ref) : -400.0; };

    for (const auto& loc : in_grid) {
        if (loc.peak->level < rel_threshold) continue;
        ++report.required;
        const bool found = std::any_of(maxima.begin(), maxima.end(), [&](const GridPeak& m) {
            return chebyshev({m.row, m.col}, loc.cell) <= 1;
        });
        if (found) {
            report.matched.push_back(*loc.peak);
        } else {
            report.missing.push_back({*loc.peak, rel_db(values(loc.cell.first, loc.cell.second))});
        }
    }

    for (const auto& m : maxima) {
        const bool predicted = std::any_of(in_grid.begin(), in_grid.end(), [&](const Located& loc) {
            return chebyshev({m.row, m.col}, loc.cell) <= 1;
        });
        if (!predicted) report.unexpected.push_back({grid.row_axis[m.row], grid.col_axis[m.col], rel_db(m.value)});
    }
    return report;
}

}  // namespace combrs
