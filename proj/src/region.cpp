#include "combrs/region.hpp"

#include "combrs/delay_sum.hpp"

namespace combrs {

std::string_view to_string(RegionChoice c) {
    switch (c) {
        case RegionChoice::kFractional: return "fractional";
        case RegionChoice::kFullSymbol: return "full_symbol";
        case RegionChoice::kDoubleFractional: return "double_fractional";
        case RegionChoice::kPartialL: return "partial_l";
    }
    return "?";
}

RegionChoice region_choice_from_string(std::string_view s) {
    if (s == "fractional") return RegionChoice::kFractional;
    if (s == "full_symbol") return RegionChoice::kFullSymbol;
    if (s == "double_fractional") return RegionChoice::kDoubleFractional;
    if (s == "partial_l") return RegionChoice::kPartialL;
    throw std::invalid_argument("unknown region choice '" + std::string(s) + "'");
}

bool RegionPiece::contains(Rational tau_ts, Rational fd_t) const {
    const bool lo = tau_min_closed ? tau_ts >= tau_min : tau_ts > tau_min;
    const bool hi = tau_max_closed ? tau_ts <= tau_max : tau_ts < tau_max;
    return lo && hi && fd_t > fd_min && fd_t < fd_max;
}

bool RegionPiece::contains(double tau_ts, double fd_t, double tol) const {
    const double a = tau_min.value(), b = tau_max.value();
    const bool lo = tau_min_closed ? tau_ts >= a - tol : tau_ts > a + tol;
    const bool hi = tau_max_closed ? tau_ts <= b + tol : tau_ts < b - tol;
    return lo && hi && fd_t > fd_min.value() + tol && fd_t < fd_max.value() - tol;
}

std::string UnambiguityRegion::label() const {
    std::string s(to_string(choice));
    if (choice == RegionChoice::kPartialL) {
        s += "(l=" + std::to_string(l) + ", variant " + std::to_string(variant);
        if (mirrored) s += ", mirrored";
        s += ")";
    }
    return s;
}

bool UnambiguityRegion::contains(Rational tau_ts, Rational fd_t) const {
    for (const auto& p : pieces)
        if (p.contains(tau_ts, fd_t)) return true;
    return false;
}

bool UnambiguityRegion::contains(const Numerology& nm, double tau_sec, double fd_hz) const {
    const double tau_ts = tau_sec / nm.t_s_sec();
    const double fd_t = fd_hz * nm.t_sec();
    for (const auto& p : pieces)
        if (p.contains(tau_ts, fd_t)) return true;
    return false;
}

std::vector<SidePeak> peaks_inside(const UnambiguityRegion& region, const PeakPrediction& prediction) {
    std::vector<SidePeak> out;
    for (const auto& p : prediction.peaks)
        if (region.contains(p.tau_ts, p.fd_t)) out.push_back(p);
    return out;
}

namespace {

RegionPiece piece(Rational t0, bool t0_closed, Rational t1, bool t1_closed, Rational f0, Rational f1) {
    RegionPiece p;
    p.tau_min = t0;
    p.tau_min_closed = t0_closed;
    p.tau_max = t1;
    p.tau_max_closed = t1_closed;
    p.fd_min = f0;
    p.fd_max = f1;
    return p;
}

bool is_sound(const UnambiguityRegion& region, const PatternConfig& config) {
    for (Algorithm a : {Algorithm::kDelaySum, Algorithm::kFft2d}) {
        if (!peaks_inside(region, predict_side_peaks(config, a)).empty()) return false;
    }
    return true;
}

}  // namespace

UnambiguityRegion unambiguity_region(const PatternConfig& config, const RegionRequest& request) {
    require_valid(config);
    const std::int64_t s_sub = config.s_sub;
    const std::int64_t s_sym = config.s_sym;
    const Rational zero(0);

    UnambiguityRegion r;
    r.choice = request.choice;

    switch (request.choice) {
        case RegionChoice::kFractional: {
            const Rational half = s_sym == 1 ? Rational(config.numerology.n_prime(), 2) : Rational(1, 2 * s_sym);
            r.pieces.push_back(piece(zero, false, Rational(1, s_sub), false, -half, half));
            break;
        }
        case RegionChoice::kFullSymbol: {
            if (config.scheme != Scheme::C && config.scheme != Scheme::D)
                throw RegionError("full_symbol region requires Scheme C or D");
            const Rational half(1, 2 * s_sym * s_sub);
            r.pieces.push_back(piece(zero, false, Rational(1), false, -half, half));
            break;
        }
        case RegionChoice::kDoubleFractional: {
            if (config.scheme != Scheme::B) throw RegionError("double_fractional region requires Scheme B");
            const Rational half(1, 4 * s_sym);
            r.pieces.push_back(piece(zero, false, Rational(2, s_sub), false, -half, half));
            break;
        }
        case RegionChoice::kPartialL: {
            if (config.scheme != Scheme::D) throw RegionError("partial_l region requires Scheme D");
            const std::int64_t l = request.l;
            if (l < 2 || l > s_sub - 1)
                throw RegionError("partial_l requires 2 <= l <= s_sub - 1 (got " + std::to_string(l) + ")");
            if (request.variant != 1 && request.variant != 2)
                throw RegionError("partial_l variant must be 1 or 2");
            r.l = static_cast<int>(l);
            r.variant = request.variant;
            const Rational narrow(1, 2 * s_sub * s_sym);
            const Rational wide(2 * s_sub - 2 * l + 1, 2 * s_sub * s_sym);
            if (request.variant == 1) {
                r.pieces.push_back(piece(zero, false, Rational(1, s_sub), false, -narrow, wide));
                r.pieces.push_back(piece(Rational(1, s_sub), true, Rational(l, s_sub), false, -narrow, narrow));
            } else {
                r.pieces.push_back(piece(Rational(l - 1, s_sub), true, Rational(l, s_sub), false, -wide, narrow));
                r.pieces.push_back(piece(zero, false, Rational(l - 1, s_sub), false, -narrow, narrow));
                if (!is_sound(r, config)) {
                    // The printed bounds assume p = 1; other slopes move the
                    // l-1 peak to the opposite Doppler side.
                    r.pieces[0].fd_min = -narrow;
                    r.pieces[0].fd_max = wide;
                    r.mirrored = true;
                }
            }
            break;
        }
    }
    if (!is_sound(r, config))
        throw RegionError("region " + r.label() + " contains a predicted side peak for this pattern");
    return r;
}

}  // namespace combrs
