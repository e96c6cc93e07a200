#pragma once

#include "combrs/peaks.hpp"
#include "combrs/region.hpp"
#include "combrs/waveform.hpp"

#include <optional>
#include <span>
#include <vector>

namespace combrs {

// Extended guard interval: the receiver drops N_cp + l N/S_sub samples of
// every symbol instead of just the CP.
struct GiSetting {
    int l = 0;
    int s_sub = 4;
    Numerology numerology;

    // Validates 0 <= l < s_sub against the config.
    static GiSetting for_config(const PatternConfig& config, int l);

    int sub_length() const { return numerology.n_fft / s_sub; }  // K = N / S_sub
    int removed_samples() const { return numerology.n_cp + l * sub_length(); }
    int kept_samples() const { return (s_sub - l) * sub_length(); }
    int isi_free_delay_samples() const;
    double isi_free_delay_sec() const;
    double retained_energy_fraction() const { return static_cast<double>(s_sub - l) / s_sub; }
};

// G_l: the last (S_sub - l) N / S_sub samples of an N'-sample symbol.
CVec remove_extended_gi(std::span<const cd> symbol_samples, const GiSetting& setting);

// G'(m) = G_l(m) exp(-j2pi F (N l / S_sub + m) / N).
CVec derotate_phase(std::span<const cd> g_l, int f_offset, const GiSetting& setting);

// Length-(S_sub - l)K DFT scaled by 1/K, so comb bins carry (S_sub - l) X.
CVec partial_fft(std::span<const cd> g_prime, const GiSetting& setting);

// X'(w S_sub + F) = B((S_sub - l) w), zero elsewhere; length N.
CVec reassemble(std::span<const cd> b, int f_offset, const GiSetting& setting);

struct ReassembledGrid {
    PatternConfig config;
    GiSetting setting;
    std::vector<CVec> reassembled;  // X'_i
    std::vector<CVec> descrambled;  // X_Ri
};

// X_Ri = X'_i conj(X_i) on comb bins, zero elsewhere.
ReassembledGrid descramble(const std::vector<CVec>& x_prime_stack, const PatternConfig& config,
                           const GiSetting& setting, const ScramblingSequence& scrambling);

// Full receiver: slice each RS symbol at its nominal start, strip the
// extended GI, derotate, partial FFT, reassemble, descramble.
ReassembledGrid receive(const TimeFrame& frame, const ScramblingSequence& scrambling, const GiSetting& setting);

// Noiseless single-target prediction of X'_i on comb bins:
// (S_sub - l) a X_i(k) e^{j2pi f* i T S_sym} e^{-j2pi N_tau k / N}.
std::vector<CVec> expected_reassembled(const PatternConfig& config, const GiSetting& setting,
                                       const ScramblingSequence& scrambling, const Target& target);

// max |X'_i - expected| / max |expected| over all symbols and bins.
double closed_form_residual(const ReassembledGrid& grid, const ScramblingSequence& scrambling, const Target& target);

struct RangeDopplerMap {
    Matrix<double> values;            // P(g, q), N x M
    std::vector<double> tau_axis_sec;  // g T_s / N
    std::vector<double> fd_axis_hz;    // signed q / (M T)
    std::vector<double> fd_axis_physical_hz;  // signed q / (M S_sym T)
    int n_fft = 0;
    int m_symbols = 0;

    static int signed_bin(int q, int m) { return q >= (m + 1) / 2 ? q - m : q; }
};

RangeDopplerMap rd_map(const ReassembledGrid& grid);

struct BinEstimate {
    int g = 0;
    int q = 0;  // unsigned bin in [0, M)
    double value = 0.0;
};

// First maximum in row-major order.
BinEstimate argmax(const RangeDopplerMap& map);

// Strongest cell inside the region; nullopt if no cell falls inside.
std::optional<BinEstimate> estimate_in_region(const RangeDopplerMap& map, const UnambiguityRegion& region,
                                              const Numerology& numerology);

// Nearest Doppler bin for a target, in [0, M).
int doppler_bin(const PatternConfig& config, double fd_hz);

PeakPrediction predict_2dfft_peaks(const PatternConfig& config, const GiSetting& setting, const Target& target);

// Matching on sqrt(P) so levels are amplitude ratios, with both axes wrapped.
MatchReport verify_prediction(const RangeDopplerMap& map, const PeakPrediction& prediction,
                              double dynamic_range_db = -13.0);

}  // namespace combrs
