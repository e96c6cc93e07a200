#pragma once

#include "combrs/peaks.hpp"
#include "combrs/waveform.hpp"

#include <vector>

namespace combrs {

// |A(tau, f_d)| sampled on a grid, normalized by the frame energy so the
// (0, 0) cell of a noiseless self-ambiguity is 1.
struct AfSurface {
    std::vector<double> tau_axis_sec;
    std::vector<double> fd_axis_hz;
    Matrix<double> magnitudes;  // rows: tau, cols: f_d
    double normalization_energy = 0.0;

    double at(std::size_t tau_idx, std::size_t fd_idx) const { return magnitudes(tau_idx, fd_idx); }
};

enum class AfWindow {
    kPerSymbol,  // only products whose two samples lie in the same RS symbol
    kFullFrame,  // plain correlation over the whole frame
};

std::string_view to_string(AfWindow w);
AfWindow af_window_from_string(std::string_view s);

class OffGridDelay : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A(tau, f) = |sum_n s(n) s*(n - tau/dt) e^{-j2pi f n dt}| / E_s.
// The Doppler hypothesis enters with the matched-filter sign, so a side peak
// at (tau, f) means a target at (0, 0) also responds at that hypothesis.
// Rows are computed in parallel; each cell is an independent sum.
AfSurface compute_af(const TimeFrame& frame, const std::vector<double>& tau_grid_sec,
                     const std::vector<double>& fd_grid_hz, AfWindow window = AfWindow::kPerSymbol,
                     unsigned threads = 0);

// tau = k dt for k = 0..points-1 (default: one effective symbol).
std::vector<double> default_tau_grid(const PatternConfig& config, int points = 0);
// f_d over [-N'/(2T), N'/(2T)) at 1/(8 M T) steps, or `points` uniform
// samples of that span.
std::vector<double> default_fd_grid(const PatternConfig& config, int points = 0);
// Doppler-bin lattice m / (M S_sym T) restricted to |f_d| <= 1/T.
std::vector<double> verification_fd_grid(const PatternConfig& config);

// Closed-form delay-and-sum magnitude at tau = l T_s / S_sub for constant
// envelope scrambling, relative to the (0,0) peak.
double predicted_af_level(const PatternConfig& config, int l, double fd_hz);

// |sum_i e^{j2pi F_i l / S_sub} e^{-j2pi fdT i S_sym}| / M.
double staggering_factor(const PatternConfig& config, int l, double fd_t);

PeakPrediction predict_side_peaks(const PatternConfig& config, Algorithm algorithm);

MatchReport verify_prediction(const AfSurface& surface, const PeakPrediction& prediction,
                              double dynamic_range_db = -13.0);

}  // namespace combrs
