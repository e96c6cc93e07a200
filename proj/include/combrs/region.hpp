#pragma once

#include "combrs/peaks.hpp"
#include "combrs/pattern.hpp"

#include <string>
#include <vector>

namespace combrs {

enum class RegionChoice {
    kFractional,        // 0 < tau < T_s/S_sub
    kFullSymbol,        // 0 < tau < T_s, narrow Doppler (Schemes C and D)
    kDoubleFractional,  // 0 < tau < 2 T_s/S_sub (Scheme B)
    kPartialL,          // two-piece region reaching l T_s/S_sub (Scheme D)
};

std::string_view to_string(RegionChoice c);
RegionChoice region_choice_from_string(std::string_view s);

// Axis-aligned rectangle in normalized units: tau / T_s and f_d * T.
// Doppler bounds are always open; delay bounds carry their own closedness.
struct RegionPiece {
    Rational tau_min, tau_max;
    bool tau_min_closed = false;
    bool tau_max_closed = false;
    Rational fd_min, fd_max;

    bool contains(Rational tau_ts, Rational fd_t) const;
    bool contains(double tau_ts, double fd_t, double tol = 1e-9) const;
};

struct RegionRequest {
    RegionChoice choice = RegionChoice::kFractional;
    int l = 2;        // partial_l only
    int variant = 1;  // partial_l: 1 or 2, the two printed forms

    friend bool operator==(const RegionRequest&, const RegionRequest&) = default;
};

struct UnambiguityRegion {
    RegionChoice choice = RegionChoice::kFractional;
    int l = 0;
    int variant = 0;
    bool mirrored = false;  // variant 2 flipped in Doppler to stay side-peak free
    std::vector<RegionPiece> pieces;

    std::string label() const;
    bool contains(Rational tau_ts, Rational fd_t) const;
    // Physical-unit membership test used on sampled grids.
    bool contains(const Numerology& nm, double tau_sec, double fd_hz) const;
};

class RegionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Throws RegionError when the choice does not apply to the scheme or the
// resulting region would contain a predicted side peak.
UnambiguityRegion unambiguity_region(const PatternConfig& config, const RegionRequest& request);

// Predicted peaks lying inside any piece (exact arithmetic on the lattice).
std::vector<SidePeak> peaks_inside(const UnambiguityRegion& region, const PeakPrediction& prediction);

}  // namespace combrs
