#include "billiards/ray.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "billiards/errors.hpp"

namespace billiards {

namespace {

struct LineRoot {
    double s;
    double t;
};

double chord_fn(const Table& table, const Vec2& p, const Vec2& v, double s, double* dg = nullptr) {
    if (dg == nullptr) return cross2(v, table.position(s) - p);
    const auto d = table.eval(s, 1);
    *dg = cross2(v, d[1]);
    return cross2(v, d[0] - p);
}

// Root of g on [lo, hi] where g(lo), g(hi) have opposite signs:
// bisection to a tight bracket, then Newton.
double bracketed_root(const Table& table, const Vec2& p, const Vec2& v, double lo, double hi,
                      double g_lo) {
    for (int it = 0; it < 24; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = chord_fn(table, p, v, mid);
        if (gm == 0.0) return mid;
        if ((gm > 0.0) == (g_lo > 0.0)) {
            lo = mid;
            g_lo = gm;
        } else {
            hi = mid;
        }
    }
    const double width = hi - lo;
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 20; ++it) {
        double dg;
        const double g = chord_fn(table, p, v, s, &dg);
        if (std::abs(g) < 1e-15 || dg == 0.0) break;
        double next = s - g / dg;
        if (next < lo - width || next > hi + width) next = 0.5 * (lo + hi);
        if (std::abs(next - s) < 1e-17) {
            s = next;
            break;
        }
        s = next;
    }
    return s;
}

struct LineScan {
    std::vector<LineRoot> roots;
    double min_abs_extremum = std::numeric_limits<double>::max();
    double tangency_s = 0.0;
};

// All intersections of the oriented line p + t v with the boundary.
// For strictly convex tables g(s) = cross(v, sigma(s)-p) has one max and
// one min (the tangent direction is monotone), so the roots are found on
// the two monotone arcs between the extrema of g. Falls back to a dense
// sign scan if the table is not convex enough for that structure.
LineScan line_roots(const Table& table, const Vec2& p, const Vec2& v) {
    const int n = 96;
    std::vector<double> gp(n);
    for (int i = 0; i < n; ++i) {
        const auto d = table.eval(static_cast<double>(i) / n, 1);
        gp[i] = cross2(v, d[1]);
    }

    std::vector<double> extrema;
    for (int i = 0; i < n; ++i) {
        const double a = gp[i], b = gp[(i + 1) % n];
        if ((a > 0.0) == (b > 0.0)) continue;
        double lo = static_cast<double>(i) / n, hi = static_cast<double>(i + 1) / n;
        double ga = a;
        for (int it = 0; it < 52; ++it) {
            const double mid = 0.5 * (lo + hi);
            const auto d = table.eval(mid, 1);
            const double gm = cross2(v, d[1]);
            if ((gm > 0.0) == (ga > 0.0)) {
                lo = mid;
                ga = gm;
            } else {
                hi = mid;
            }
        }
        extrema.push_back(0.5 * (lo + hi));
    }

    LineScan scan;
    auto add_root = [&](double s) {
        s = wrap01(s);
        for (const LineRoot& r : scan.roots) {
            if (circle_dist(r.s, s) < 1e-12) return;
        }
        const Vec2 q = table.position(s);
        scan.roots.push_back(LineRoot{s, (q - p).dot(v)});
    };

    if (extrema.size() == 2) {
        double s0 = extrema[0], s1 = extrema[1];
        const double g0 = chord_fn(table, p, v, s0);
        const double g1 = chord_fn(table, p, v, s1);
        if (std::abs(g0) < std::abs(g1)) {
            scan.min_abs_extremum = std::abs(g0);
            scan.tangency_s = s0;
        } else {
            scan.min_abs_extremum = std::abs(g1);
            scan.tangency_s = s1;
        }
        if ((g0 > 0.0) != (g1 > 0.0)) {
            add_root(bracketed_root(table, p, v, s0, s1, g0));
            add_root(bracketed_root(table, p, v, s1, s0 + 1.0, g1));
        }
        return scan;
    }

    // non-convex fallback: dense sign scan
    const int m = 1024;
    double prev = chord_fn(table, p, v, 0.0);
    for (int i = 0; i < m; ++i) {
        const double s1 = static_cast<double>(i + 1) / m;
        const double cur = chord_fn(table, p, v, s1);
        scan.min_abs_extremum = std::min(scan.min_abs_extremum, std::abs(cur));
        if ((prev > 0.0) != (cur > 0.0)) {
            add_root(bracketed_root(table, p, v, static_cast<double>(i) / m, s1, prev));
        }
        prev = cur;
    }
    return scan;
}

BouncePoint make_bounce(const Table& table, const Vec2& v, const LineRoot& r,
                        const Tolerances& tol, bool check_exit) {
    const Frame f = table.frame(r.s);
    const double vn = v.dot(f.normal);
    if (std::abs(vn) < tol.grazing) {
        throw GrazingError("tangential incidence at boundary", r.s);
    }
    if (check_exit && vn > 0.0) {
        throw GeometryError("selected boundary intersection is not an exit");
    }
    const double alpha = std::atan2(-vn, v.dot(f.tangent));
    return BouncePoint{r.s, r.t, alpha, table.position(r.s)};
}

}  // namespace

BouncePoint first_hit(const Table& table, const RayState& ray, const Tolerances& tol) {
    const LineScan scan = line_roots(table, ray.p, ray.v);
    const LineRoot* best = nullptr;
    for (const LineRoot& r : scan.roots) {
        if (r.t <= tol.t_min) continue;
        const Frame f = table.frame(r.s);
        if (ray.v.dot(f.normal) > 0.0) continue;  // entry point of a basepoint outside
        if (best == nullptr || r.t < best->t) best = &r;
    }
    if (best == nullptr) {
        if (scan.min_abs_extremum < 1e-9 * std::max(1.0, table.diameter())) {
            throw GrazingError("ray tangent to the boundary", scan.tangency_s);
        }
        throw GeometryError("ray does not meet the boundary in the forward direction");
    }
    return make_bounce(table, ray.v, *best, tol, true);
}

BouncePoint exit_hit(const Table& table, const Vec2& p, const Vec2& v, const Tolerances& tol) {
    const LineScan scan = line_roots(table, p, v);
    const LineRoot* best = nullptr;
    for (const LineRoot& r : scan.roots) {
        if (best == nullptr || r.t > best->t) best = &r;
    }
    if (best == nullptr || best->t <= tol.t_min) {
        if (scan.min_abs_extremum < 1e-9 * std::max(1.0, table.diameter())) {
            throw GrazingError("line tangent to the boundary", scan.tangency_s);
        }
        throw GeometryError("line does not meet the table interior");
    }
    return make_bounce(table, v, *best, tol, true);
}

std::pair<double, double> billiard_map(const Table& table, double s, double alpha,
                                       const Tolerances& tol) {
    const Frame f = table.frame(s);
    const Vec2 v = std::cos(alpha) * f.tangent + std::sin(alpha) * f.normal;
    const BouncePoint hit = first_hit(table, RayState{table.position(s), v}, tol);
    return {hit.s, hit.alpha};
}

TraceResult trace(const Table& table, const RayState& ray, int bounces, const Tolerances& tol) {
    TraceResult res;
    res.final_state = ray;
    Vec2 p = ray.p;
    Vec2 v = ray.v;
    for (int i = 0; i < bounces; ++i) {
        BouncePoint hit;
        try {
            hit = first_hit(table, RayState{p, v}, tol);
        } catch (const GrazingError& e) {
            throw GrazingError(std::string(e.what()) + " at bounce " + std::to_string(i), e.s, i);
        }
        res.length += hit.t;
        const Frame f = table.frame(hit.s);
        v = reflect(v, f.normal);
        p = hit.point;
        res.bounces.push_back(hit);
        res.final_state = RayState{p, v};
    }
    return res;
}

}  // namespace billiards
