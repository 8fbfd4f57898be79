#ifndef BILLIARDS_PATHS_HPP
#define BILLIARDS_PATHS_HPP

#include <cstdint>
#include <vector>

#include "billiards/beams.hpp"

namespace billiards {

enum class Exec { serial, parallel };

struct PathCertificate {
    double residual = 0.0;   // max over vertices of |angle_in - angle_out|
    double min_alpha = 0.0;  // smallest incidence angle
    double length = 0.0;

    bool accepted(const Tolerances& tol = default_tolerances()) const {
        return residual < tol.certificate && min_alpha > tol.grazing;
    }
};

struct CertifiedPath {
    PolygonalPath path;
    PathCertificate cert;
};

struct LengthGradient {
    double length;
    std::vector<double> grad;
};

// Builds a table-backed path from boundary parameters.
PolygonalPath make_path(const Table& table, const Vec2& x, const Vec2& y,
                        const std::vector<double>& s);

PathCertificate certify(const Table& table, const PolygonalPath& path);

// Length of the polygonal path x, sigma(s_1), ..., sigma(s_m), y and its
// analytic gradient with respect to the boundary parameters. The gradient
// vanishes exactly at equal-angle configurations.
LengthGradient path_length(const Table& table, const Vec2& x, const Vec2& y,
                           const std::vector<double>& s);

// Multi-start ascent of the length functional (gradient ascent with
// backtracking, then Newton polish on the gradient system). Returns all
// distinct certified critical paths, longest first. Deterministic for a
// fixed seed regardless of the execution policy.
std::vector<CertifiedPath> max_length_path(const Table& table, const Vec2& x, const Vec2& y,
                                           int m, int starts, std::uint64_t seed,
                                           Exec exec = Exec::parallel,
                                           const Tolerances& tol = default_tolerances());

// Differentiable endpoint map of the shooting problem: (u, t) on the m-th
// reflected line of the pencil at p with base angle theta.
class ShootEvaluator {
public:
    ShootEvaluator(const Table& table, const Vec2& p, double theta, int m,
                   const Tolerances& tol = default_tolerances());

    LineSample line(double u) const { return family_.at(u); }
    Vec2 eval(double u, double t) const {
        const LineSample s = family_.at(u);
        return s.xi + t * s.v;
    }
    Mat2 jacobian(double u, double t) const {
        const LineSample s = family_.at(u);
        Mat2 j;
        j.col(0) = s.dxi + t * s.dv;
        j.col(1) = s.v;
        return j;
    }
    TraceResult trace_at(double u) const;
    const TraceResult& base_trace() const { return base_; }
    int bounces() const { return m_; }
    double theta() const { return theta_; }

private:
    const Table* table_;
    Vec2 p_;
    double theta_;
    int m_;
    LineFamily family_;
    TraceResult base_;
    Tolerances tol_;
};

inline ShootEvaluator shoot(const Table& table, const Vec2& p, double theta, int m,
                            const Tolerances& tol = default_tolerances()) {
    return ShootEvaluator(table, p, theta, m, tol);
}

enum class ShootStatus {
    converged,
    singular_jacobian,  // conjugate-point obstruction
    no_convergence,
    grazing,
    outside_bounce_window,  // endpoint not reached between reflections m and m+1
};

struct ShootResult {
    double u_star = 0.0;  // angle offset relative to theta0
    double t_star = 0.0;
    PolygonalPath path;
    bool converged = false;
    int iterations = 0;
    ShootStatus status = ShootStatus::no_convergence;
    double residual = 0.0;
};

// Newton iteration on ell_m(u, t) = q with the analytic Jacobian.
ShootResult solve_shooting(const Table& table, const Vec2& p, const Vec2& q, int m,
                           double theta0, const Tolerances& tol = default_tolerances());

// Runs max_length_path for every bounce count 0..max_bounces and returns
// the deduplicated certified paths.
std::vector<CertifiedPath> enumerate_paths(const Table& table, const Vec2& x, const Vec2& y,
                                           int max_bounces, int starts_per_m, std::uint64_t seed,
                                           Exec exec = Exec::parallel,
                                           const Tolerances& tol = default_tolerances());

}  // namespace billiards

#endif
