#ifndef BILLIARDS_RAY_HPP
#define BILLIARDS_RAY_HPP

#include <utility>
#include <vector>

#include "billiards/curve.hpp"
#include "billiards/geometry.hpp"
#include "billiards/tolerances.hpp"

namespace billiards {

inline const Tolerances& default_tolerances() {
    static const Tolerances t;
    return t;
}

struct RayState {
    Vec2 p;  // basepoint, interior or boundary
    Vec2 v;  // unit direction
};

struct BouncePoint {
    double s;      // boundary parameter of the impact
    double t;      // ray parameter of the impact
    double alpha;  // incidence angle in (0, pi), measured from T(s) to the incoming direction
    Vec2 point;
};

// Polygonal path from x to y with vertices on the table boundary.
// `s` carries boundary parameters when the path is table-backed; geometry
// predicates only use `pts`, so synthetic paths may leave `s` empty.
struct PolygonalPath {
    Vec2 x, y;
    std::vector<double> s;
    std::vector<Vec2> pts;

    int bounces() const { return static_cast<int>(pts.size()); }

    // x, vertices..., y
    std::vector<Vec2> all_points() const {
        std::vector<Vec2> r;
        r.reserve(pts.size() + 2);
        r.push_back(x);
        r.insert(r.end(), pts.begin(), pts.end());
        r.push_back(y);
        return r;
    }

    double length() const {
        const auto p = all_points();
        double acc = 0.0;
        for (size_t i = 0; i + 1 < p.size(); ++i) acc += (p[i + 1] - p[i]).norm();
        return acc;
    }
};

struct TraceResult {
    std::vector<BouncePoint> bounces;
    RayState final_state;  // outgoing state after the last bounce (the input ray if none)
    double length = 0.0;   // cumulative length up to the last bounce point
};

// v - 2<N,v>N
inline Vec2 reflect(const Vec2& v, const Vec2& n) { return v - 2.0 * n.dot(v) * n; }

// First forward boundary impact of the ray (exit intersection; parameters
// below t_min are the departure point and are skipped).
BouncePoint first_hit(const Table& table, const RayState& ray,
                      const Tolerances& tol = default_tolerances());

// Largest-parameter boundary intersection of the oriented line; this is the
// t_b of a reflected line family and tolerates basepoints slightly outside
// the table (as happens when chaining reflections across perturbed tables).
BouncePoint exit_hit(const Table& table, const Vec2& p, const Vec2& v,
                     const Tolerances& tol = default_tolerances());

// Birkhoff section map: (s, alpha) -> (s', alpha').
std::pair<double, double> billiard_map(const Table& table, double s, double alpha,
                                       const Tolerances& tol = default_tolerances());

// Iterates first_hit/reflect exactly `bounces` times.
TraceResult trace(const Table& table, const RayState& ray, int bounces,
                  const Tolerances& tol = default_tolerances());

}  // namespace billiards

#endif
