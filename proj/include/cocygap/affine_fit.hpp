#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "errors.hpp"

namespace cocygap {

// Certificate y >= slope * x - intercept, intercept >= 0.
struct AffineBound {
    double slope = 0.0;
    double intercept = 0.0;
    double anchor = 0.0;

    double at(double x) const { return slope * x - intercept; }
};

inline bool affine_bound_holds(const AffineBound& b, const std::vector<double>& x, const std::vector<double>& y) {
    for (std::size_t k = 0; k < x.size(); ++k)
        if (y[k] < b.at(x[k])) return false;
    return true;
}

inline double default_anchor(const std::vector<double>& x) {
    double xmax = 0.0;
    for (double v : x) xmax = std::max(xmax, v);
    return 0.5 * xmax;
}

// Solves the linear program
//     maximize   anchor * C - C'
//     subject to C * x_k - C' <= y_k  for all k,   C' >= 0,
// i.e. the best affine minorant of the data evaluated at the anchor; ties are
// broken towards the larger slope C. The feasible minorants are exactly the
// lines below the lower convex hull of the data together with the origin, so
// the optimum is the hull edge above the anchor.
inline AffineBound fit_affine_lower_bound(const std::vector<double>& x, const std::vector<double>& y, double anchor) {
    if (x.size() != y.size()) throw DimensionMismatch("affine fit: x and y differ in length");
    struct Pt {
        double x, y;
    };
    std::vector<Pt> pts{{0.0, 0.0}};
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!(x[k] >= 0.0) || !std::isfinite(y[k])) throw ValidationError("affine fit: need x >= 0 and finite y");
        pts.push_back({x[k], y[k]});
    }
    std::sort(pts.begin(), pts.end(), [](const Pt& a, const Pt& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    // keep the lowest point per abscissa
    std::vector<Pt> uniq;
    for (const auto& p : pts)
        if (uniq.empty() || uniq.back().x != p.x) uniq.push_back(p);
    AffineBound out;
    out.anchor = anchor;
    if (uniq.size() < 2 || anchor >= uniq.back().x) {
        // no data to the right of the anchor: the slope is unconstrained above, report a flat bound
        double lo = 0.0;
        for (const auto& p : uniq) lo = std::min(lo, p.y);
        out.intercept = -lo;
        return out;
    }
    std::vector<Pt> hull;
    for (const auto& p : uniq) {
        while (hull.size() >= 2) {
            const Pt& a = hull[hull.size() - 2];
            const Pt& b = hull.back();
            double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
            if (cross <= 0.0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(p);
    }
    std::size_t e = 0;
    while (e + 2 < hull.size() && hull[e + 1].x <= anchor) ++e;
    const Pt& a = hull[e];
    const Pt& b = hull[e + 1];
    out.slope = (b.y - a.y) / (b.x - a.x);
    out.intercept = std::max(0.0, out.slope * a.x - a.y);
    // absorb rounding so the certificate holds exactly in floating point
    double worst = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) worst = std::max(worst, out.slope * x[k] - out.intercept - y[k]);
    out.intercept += worst;
    AffineBound probe = out;
    while (!affine_bound_holds(probe, x, y)) {
        probe.intercept = std::nextafter(probe.intercept + 4.0 * std::numeric_limits<double>::epsilon() *
                                                               std::abs(probe.intercept),
                                         std::numeric_limits<double>::infinity());
    }
    out.intercept = probe.intercept;
    return out;
}

inline AffineBound fit_affine_lower_bound(const std::vector<double>& x, const std::vector<double>& y) {
    return fit_affine_lower_bound(x, y, default_anchor(x));
}

}  // namespace cocygap
