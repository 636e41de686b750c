#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zblow/error.hpp"
#include "zblow/grid.hpp"
#include "zblow/physical_solver.hpp"
#include "zblow/zeros.hpp"

namespace zblow {

struct ZeroSample {
    double t = 0.0;
    std::vector<double> zeros;
    /// b vanishes identically; no zero is tracked
    bool degenerate = false;
    /// the zero itself when there is exactly one
    std::optional<double> gamma;
    /// nearest-position continuation of the previous tracked zero
    std::optional<double> continued;
    /// continuation had two equidistant candidates
    bool tie = false;

    std::size_t count() const { return zeros.size(); }
};

/// Which side of the tracked zero carries negative b.
enum class SignOrientation { Undetermined, NegativeLeft, NegativeRight, Mixed };

inline const char* to_string(SignOrientation o) {
    switch (o) {
    case SignOrientation::NegativeLeft: return "negative_left";
    case SignOrientation::NegativeRight: return "negative_right";
    case SignOrientation::Mixed: return "mixed";
    default: return "undetermined";
    }
}

struct ZeroTrack {
    std::vector<ZeroSample> samples;
    /// indices k with count(k) > count(k-1), skipping degenerate samples
    std::vector<std::size_t> monotonicity_violations;
    std::size_t ties = 0;
    SignOrientation orientation = SignOrientation::Undetermined;
};

namespace detail {

inline SignOrientation orientation_at(const PdeState& s, double gamma) {
    double left = 0.0, right = 0.0;
    for (std::size_t i = 0; i < s.grid.n_points; ++i) {
        const double x = s.grid.x(i);
        if (x < gamma && s.b[i] != 0.0) left = s.b[i];
        if (x > gamma && s.b[i] != 0.0) {
            right = s.b[i];
            break;
        }
    }
    if (left < 0.0 && right > 0.0) return SignOrientation::NegativeLeft;
    if (left > 0.0 && right < 0.0) return SignOrientation::NegativeRight;
    return SignOrientation::Undetermined;
}

inline void continue_track(ZeroTrack& track) {
    std::optional<double> prev;
    std::optional<std::size_t> prev_count;
    for (std::size_t k = 0; k < track.samples.size(); ++k) {
        auto& s = track.samples[k];
        if (s.degenerate) continue;
        if (prev_count && s.count() > *prev_count) track.monotonicity_violations.push_back(k);
        prev_count = s.count();

        if (s.count() == 1) {
            s.gamma = s.zeros.front();
            s.continued = s.gamma;
        } else if (s.count() > 1 && prev) {
            double best = std::numeric_limits<double>::infinity();
            for (double z : s.zeros) {
                const double d = std::abs(z - *prev);
                if (d < best) {
                    best = d;
                    s.continued = z; // zeros are sorted, so the first minimum is the smaller x
                    s.tie = false;
                } else if (d == best) {
                    s.tie = true;
                }
            }
            if (s.tie) ++track.ties;
        }
        if (s.continued) prev = s.continued;
    }
}

} // namespace detail

/// Zero sets of b along a time-ordered history.
inline ZeroTrack track(std::span<const PdeState> history) {
    ZeroTrack tr;
    for (std::size_t k = 0; k < history.size(); ++k) {
        const auto& st = history[k];
        if (k > 0 && st.t < history[k - 1].t) throw InvalidArgument("history must be time-ordered");
        ZeroSample s;
        s.t = st.t;
        s.degenerate = std::all_of(st.b.begin(), st.b.end(), [](double v) { return v == 0.0; });
        if (!s.degenerate) s.zeros = find_zeros(st.b, st.grid);
        tr.samples.push_back(std::move(s));
    }
    detail::continue_track(tr);

    for (std::size_t k = 0; k < history.size(); ++k) {
        if (!tr.samples[k].gamma) continue;
        const auto o = detail::orientation_at(history[k], *tr.samples[k].gamma);
        if (o == SignOrientation::Undetermined) continue;
        if (tr.orientation == SignOrientation::Undetermined) tr.orientation = o;
        else if (tr.orientation != o) tr.orientation = SignOrientation::Mixed;
    }
    return tr;
}

/// Same bookkeeping from solver trajectory rows, which carry the zeros but not
/// the fields; the orientation stays undetermined.
inline ZeroTrack track(std::span<const TrajectorySample> rows) {
    ZeroTrack tr;
    for (const auto& row : rows) {
        ZeroSample s;
        s.t = row.t;
        s.degenerate = row.sup_b == 0.0;
        if (!s.degenerate) s.zeros = row.zeros;
        tr.samples.push_back(std::move(s));
    }
    detail::continue_track(tr);
    return tr;
}

struct GammaAtT {
    bool applicable = false;
    double gamma_T = std::numeric_limits<double>::quiet_NaN();
    double gap = std::numeric_limits<double>::quiet_NaN();
    bool agrees = false;
};

/// Extrapolates the single zero of b to the blow-up time and compares it with
/// the location of the maximum of |z|. Agreement means a gap of at most 3 dx.
inline GammaAtT gamma_at_T(const ZeroTrack& tr, const BlowupReport& report) {
    GammaAtT g;
    if (!report.blew_up) return g;
    std::vector<const ZeroSample*> ones;
    for (const auto& s : tr.samples)
        if (s.gamma) ones.push_back(&s);
    if (ones.empty()) return g;

    g.applicable = true;
    const auto& last = *ones.back();
    g.gamma_T = *last.gamma;
    if (ones.size() >= 2) {
        const auto& prev = *ones[ones.size() - 2];
        if (last.t > prev.t)
            g.gamma_T += (*last.gamma - *prev.gamma) / (last.t - prev.t) * (report.T_est - last.t);
    }
    g.gap = std::abs(g.gamma_T - report.x_blowup);
    g.agrees = g.gap <= 3.0 * report.dx;
    return g;
}

struct JumpProxy {
    bool holds = true;
    double max_excess = -std::numeric_limits<double>::infinity();
    std::size_t pairs = 0;
};

/// Continuity proxy for the tracked zero: consecutive single-zero samples may
/// move by at most C sqrt(dt_sample) + 2 dx.
inline JumpProxy gamma_jump_proxy(const ZeroTrack& tr, double dx, double C = 1.0) {
    JumpProxy j;
    const ZeroSample* prev = nullptr;
    for (const auto& s : tr.samples) {
        if (!s.gamma) {
            prev = nullptr;
            continue;
        }
        if (prev) {
            const double bound = C * std::sqrt(s.t - prev->t) + 2.0 * dx;
            const double excess = std::abs(*s.gamma - *prev->gamma) - bound;
            j.max_excess = std::max(j.max_excess, excess);
            j.holds = j.holds && excess <= 0.0;
            ++j.pairs;
        }
        prev = &s;
    }
    return j;
}

// ---------------------------------------------------------------------------

struct QuotientSample {
    double t = 0.0;
    /// sup of a/b over the nodes strictly inside the region
    double interior_sup = 0.0;
    /// running sup of a/b over the parabolic boundary: whole region at the
    /// first sample, region endpoints afterwards
    double boundary_sup = 0.0;
};

/// Tracks the quotient a/b where b stays positive. a/b obeys
///   g_t = g_xx + 2 (b_x / b) g_x - (a^2 + b^2) / b,
/// whose source is nonpositive, so its interior sup is controlled by the
/// parabolic boundary.
struct QuotientMonitor {
    double x_lo = 0.0;
    double x_hi = 0.0;
    double delta_floor = 0.0;
    std::vector<QuotientSample> samples;
    bool stopped = false;
    double stopped_at = std::numeric_limits<double>::quiet_NaN();
    double max_excess = -std::numeric_limits<double>::infinity();

    bool holds(double tol) const { return max_excess <= tol; }
};

inline QuotientMonitor quotient_monitor(std::span<const PdeState> history, double x_lo, double x_hi,
                                        double delta_floor) {
    if (!(x_hi > x_lo)) throw InvalidArgument("quotient region must have x_lo < x_hi");
    if (!(delta_floor > 0.0)) throw InvalidArgument("delta_floor must be positive");
    QuotientMonitor m;
    m.x_lo = x_lo;
    m.x_hi = x_hi;
    m.delta_floor = delta_floor;
    if (history.empty()) return m;

    const auto& grid = history.front().grid;
    std::size_t lo = grid.n_points, hi = 0;
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        const double x = grid.x(i);
        if (x >= x_lo && x <= x_hi) {
            lo = std::min(lo, i);
            hi = std::max(hi, i);
        }
    }
    if (lo >= hi) throw InvalidArgument("quotient region covers fewer than two nodes");

    double boundary = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < history.size(); ++k) {
        const auto& s = history[k];
        bool floor_ok = true;
        for (std::size_t i = lo; i <= hi; ++i) floor_ok = floor_ok && s.b[i] >= delta_floor;
        if (!floor_ok) {
            m.stopped = true;
            m.stopped_at = s.t;
            break;
        }
        QuotientSample q;
        q.t = s.t;
        q.interior_sup = -std::numeric_limits<double>::infinity();
        for (std::size_t i = lo + 1; i < hi; ++i) q.interior_sup = std::max(q.interior_sup, s.a[i] / s.b[i]);
        if (k == 0) {
            for (std::size_t i = lo; i <= hi; ++i) boundary = std::max(boundary, s.a[i] / s.b[i]);
        } else {
            boundary = std::max({boundary, s.a[lo] / s.b[lo], s.a[hi] / s.b[hi]});
            m.max_excess = std::max(m.max_excess, q.interior_sup - boundary);
        }
        q.boundary_sup = boundary;
        m.samples.push_back(q);
    }
    return m;
}

} // namespace zblow
