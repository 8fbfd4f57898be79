#ifndef BILLIARDS_BEAMS_HPP
#define BILLIARDS_BEAMS_HPP

#include <functional>
#include <memory>
#include <vector>

#include "billiards/ray.hpp"

namespace billiards {

struct Interval {
    double lo = -1e-2;
    double hi = 1e-2;
};

// First-order data of a 1-parameter family of oriented lines at one u:
// basepoint, unit direction, and their u-derivatives.
struct LineSample {
    Vec2 xi, v, dxi, dv;
};

// Differentiable family of oriented lines: a closed-form seed composed with
// recorded reflection steps. Derivatives are propagated analytically through
// each reflection (implicit differentiation of the hit condition), never by
// finite differences. Immutable; evaluation is pure.
class LineFamily {
public:
    using Seed = std::function<LineSample(double)>;

    LineFamily(Seed seed, Interval domain) : seed_(std::move(seed)), dom_(domain) {}

    LineSample at(double u) const;
    const Interval& domain() const { return dom_; }
    int reflections() const { return static_cast<int>(steps_.size()); }

    LineFamily with_reflection(std::shared_ptr<const Table> table) const {
        LineFamily f = *this;
        f.steps_.push_back(std::move(table));
        return f;
    }

private:
    Seed seed_;
    Interval dom_;
    std::vector<std::shared_ptr<const Table>> steps_;
};

// Homogeneous focusing distance (a : b), f = a/b; b = 0 encodes infinity.
struct FocusRatio {
    double a = 0.0;
    double b = 1.0;

    static FocusRatio finite(double f) { return normalized(f, 1.0); }
    static FocusRatio infinite() { return FocusRatio{1.0, 0.0}; }
    static FocusRatio normalized(double a, double b);

    bool is_finite(double rel = 1e-12) const { return std::abs(b) > rel * std::abs(a); }
    double value() const { return a / b; }
};

// 2x2 matrix acting on (a, b) by f -> (m00 f + m01)/(m10 f + m11).
struct Moebius {
    double m00 = 1.0, m01 = 0.0, m10 = 0.0, m11 = 1.0;

    FocusRatio apply(const FocusRatio& f) const {
        return FocusRatio::normalized(m00 * f.a + m01 * f.b, m10 * f.a + m11 * f.b);
    }
    Moebius then(const Moebius& after) const {  // after * this
        return Moebius{after.m00 * m00 + after.m01 * m10, after.m00 * m01 + after.m01 * m11,
                       after.m10 * m00 + after.m11 * m10, after.m10 * m01 + after.m11 * m11};
    }
    void normalize();
};

struct DegeneracyWitness {
    bool degenerate;
    double dv_norm;        // |v'(u0)|
    double basepoint_dev;  // |cross(xi'(u0), v(u0))|
};

struct FocusChainRecord {
    double s;
    double kappa;
    double alpha;
    double rho;  // distance from this vertex to the next path point
    FocusRatio f_before;  // focus of the incoming family, origin at this vertex
    FocusRatio f_after;   // after the mirror step and the origin shift by rho
};

struct FocusChain {
    double rho0 = 0.0;  // |x - V1|, the seed focus is -rho0
    std::vector<FocusChainRecord> records;
    FocusRatio result;  // focusing distance with origin at the final endpoint
};

struct ConjugacyResult {
    bool conjugate;
    double margin;  // f_m as a real number; +-inf encoded as huge when b ~ 0
    FocusRatio focus;
};

// Family of lines through p at angle theta0 + u.
LineFamily pencil(const Vec2& p, double theta0, Interval domain);

// Focusing distance of the family at u0; (1, 0) when |v'| is below the
// degeneracy tolerance (focus at infinity).
FocusRatio envelope(const LineFamily& family, double u0,
                    const Tolerances& tol = default_tolerances());

// Reflects every line of the family off the table boundary; checks on a
// sample grid that each line meets the interior without grazing.
LineFamily reflect_family(const Table& table, const LineFamily& family);

DegeneracyWitness is_degenerate(const LineFamily& family, double u0,
                                const Tolerances& tol = default_tolerances());

// Mirror-equation step as a Moebius matrix: 1/f_out' = 1/f_in + 2 kappa z / sin(alpha),
// then f_out = f_out' - rho_next.
Moebius mirror_matrix(double kappa, double alpha, double rho_next, double z);

FocusRatio mirror_step(const FocusRatio& f_in, double kappa, double alpha, double rho_next,
                       double z = 1.0, const Tolerances& tol = default_tolerances());

// Pencil-seeded focus propagation along a certified billiard path, with all
// vertex curvatures scaled by z. Returns the per-bounce records and the final
// focus with origin at the endpoint.
FocusChain focus_chain(const Table& table, const PolygonalPath& path, double z = 1.0,
                       const Tolerances& tol = default_tolerances());

FocusRatio propagate_focus(const Table& table, const PolygonalPath& path, double z = 1.0,
                           const Tolerances& tol = default_tolerances());

ConjugacyResult conjugacy_test(const Table& table, const PolygonalPath& path,
                               const Tolerances& tol = default_tolerances());

// Max |angle_in - angle_out| over the path's vertices; min incidence angle
// via the optional out-parameter. Shared by path certification and the
// chain's precondition check.
double reflection_residual(const Table& table, const PolygonalPath& path,
                           double* min_alpha = nullptr);

}  // namespace billiards

#endif
