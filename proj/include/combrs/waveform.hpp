#pragma once

#include "combrs/pattern.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace combrs {

// M CP-added RS symbols placed at i * S_sym * N' with zero-filled gaps.
struct TimeFrame {
    CVec samples;
    double sample_period_sec = 0.0;
    std::vector<std::size_t> symbol_starts;
    PatternConfig config;
};

// Z(n) for n = 0..N'-1: the comb symbol with its cyclic prefix, no 1/N scaling.
CVec modulate_symbol(const PatternConfig& config, int symbol_index, const ScramblingSequence& scrambling);

TimeFrame build_frame(const PatternConfig& config, const ScramblingSequence& scrambling);

struct Target {
    int delay_samples = 0;
    double doppler_hz = 0.0;
    cd amplitude{1.0, 0.0};
};

enum class DopplerModel {
    kRamp,   // e^{j2pi f n dt} per output sample
    kBlock,  // e^{j2pi f i S_sym T} held constant over transmitted symbol i
};

std::string_view to_string(DopplerModel m);
DopplerModel doppler_model_from_string(std::string_view s);

// Targets with |f_d| above SCS/10 break the per-symbol constant phase
// approximation. Returns one message per offending target.
std::vector<std::string> doppler_warnings(const std::vector<Target>& targets, const Numerology& numerology);

// Sum of delayed, Doppler-rotated, scaled copies plus complex white Gaussian
// noise of total power noise_power (per complex sample). Output keeps the
// input length; samples delayed past the end are dropped.
TimeFrame apply_channel(const TimeFrame& frame, const std::vector<Target>& targets, double noise_power,
                        DopplerModel model, std::uint64_t seed);

double energy(std::span<const cd> x);

// Little-endian interleaved float64 (re, im) dump of the samples.
std::vector<std::uint8_t> encode_samples_f64le(std::span<const cd> samples);
CVec decode_samples_f64le(std::span<const std::uint8_t> bytes);

}  // namespace combrs
