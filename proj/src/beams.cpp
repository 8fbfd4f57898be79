#include "billiards/beams.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "billiards/errors.hpp"

namespace billiards {

namespace {

LineSample reflect_sample(const Table& table, const LineSample& in, const Tolerances& tol) {
    const BouncePoint hit = exit_hit(table, in.xi, in.v, tol);
    const Frame f = table.frame(hit.s);
    const double vn = in.v.dot(f.normal);

    const double tb = hit.t;
    const double dtb = -f.normal.dot(in.dxi + tb * in.dv) / vn;

    LineSample out;
    out.xi = in.xi + tb * in.v;
    out.dxi = in.dxi + dtb * in.v + tb * in.dv;

    // ds/du from xi1(u) = sigma(s(u)); dN/du by the Frenet relation.
    const double ds = out.dxi.dot(f.tangent) / f.speed;
    const Vec2 dn = -f.kappa * f.speed * ds * f.tangent;

    out.v = in.v - 2.0 * vn * f.normal;
    out.dv = in.dv - 2.0 * (dn.dot(in.v) + f.normal.dot(in.dv)) * f.normal - 2.0 * vn * dn;
    return out;
}

}  // namespace

LineSample LineFamily::at(double u) const {
    LineSample s = seed_(u);
    for (const auto& table : steps_) {
        s = reflect_sample(*table, s, default_tolerances());
    }
    return s;
}

FocusRatio FocusRatio::normalized(double a, double b) {
    const double m = std::max(std::abs(a), std::abs(b));
    if (m == 0.0) throw Error("focus ratio (0, 0) is not a projective point");
    return FocusRatio{a / m, b / m};
}

void Moebius::normalize() {
    const double m = std::max(std::max(std::abs(m00), std::abs(m01)),
                              std::max(std::abs(m10), std::abs(m11)));
    if (m > 0.0) {
        m00 /= m;
        m01 /= m;
        m10 /= m;
        m11 /= m;
    }
}

LineFamily pencil(const Vec2& p, double theta0, Interval domain) {
    return LineFamily(
        [p, theta0](double u) {
            const double th = theta0 + u;
            return LineSample{p, unit_vector(th), Vec2::Zero(), Vec2(-std::sin(th), std::cos(th))};
        },
        domain);
}

FocusRatio envelope(const LineFamily& family, double u0, const Tolerances& tol) {
    const LineSample s = family.at(u0);
    const double dv2 = s.dv.squaredNorm();
    if (std::sqrt(dv2) < tol.degeneracy) return FocusRatio::infinite();
    return FocusRatio::finite(-s.dxi.dot(s.dv) / dv2);
}

LineFamily reflect_family(const Table& table, const LineFamily& family) {
    auto shared = std::make_shared<const Table>(table);
    LineFamily out = family.with_reflection(shared);
    const Interval dom = family.domain();
    const int probes = 9;
    for (int i = 0; i < probes; ++i) {
        const double u = dom.lo + (dom.hi - dom.lo) * i / (probes - 1);
        out.at(u);  // throws GrazingError / GeometryError on bad samples
    }
    return out;
}

DegeneracyWitness is_degenerate(const LineFamily& family, double u0, const Tolerances& tol) {
    const LineSample s = family.at(u0);
    const double dvn = s.dv.norm();
    const double dev = std::abs(cross2(s.dxi, s.v));
    const bool deg = dvn < tol.degeneracy && dev < tol.degeneracy * std::max(1.0, s.dxi.norm());
    return DegeneracyWitness{deg, dvn, dev};
}

Moebius mirror_matrix(double kappa, double alpha, double rho_next, double z) {
    const double c = 2.0 * kappa * z / std::sin(alpha);
    Moebius m{1.0 - rho_next * c, -rho_next, c, 1.0};
    m.normalize();
    return m;
}

FocusRatio mirror_step(const FocusRatio& f_in, double kappa, double alpha, double rho_next,
                       double z, const Tolerances& tol) {
    if (std::sin(alpha) <= tol.grazing) {
        throw GrazingError("mirror step at grazing incidence", 0.0);
    }
    return mirror_matrix(kappa, alpha, rho_next, z).apply(f_in);
}

double reflection_residual(const Table& table, const PolygonalPath& path, double* min_alpha) {
    const auto pts = path.all_points();
    double res = 0.0;
    double ma = M_PI_2;
    for (int i = 0; i < path.bounces(); ++i) {
        const Vec2& v = pts[i + 1];
        const Vec2 in = (v - pts[i]).normalized();
        const Vec2 out = (pts[i + 2] - v).normalized();
        const Frame f = table.frame(path.s[i]);
        const double a_in = std::atan2(-in.dot(f.normal), in.dot(f.tangent));
        const double a_out = std::atan2(out.dot(f.normal), out.dot(f.tangent));
        res = std::max(res, std::abs(a_in - a_out));
        ma = std::min(ma, std::min(a_in, a_out));
    }
    if (min_alpha) *min_alpha = ma;
    return res;
}

FocusChain focus_chain(const Table& table, const PolygonalPath& path, double z,
                       const Tolerances& tol) {
    if (static_cast<int>(path.s.size()) != path.bounces()) {
        throw InvalidPathError("focus chain needs boundary parameters for every vertex");
    }
    const double res = reflection_residual(table, path);
    if (res >= tol.certificate) {
        throw InvalidPathError("path is not a certified billiard path (residual " +
                               std::to_string(res) + ")");
    }

    const auto pts = path.all_points();
    FocusChain chain;
    chain.rho0 = (pts[1] - pts[0]).norm();
    FocusRatio f = FocusRatio::finite(-chain.rho0);
    for (int i = 0; i < path.bounces(); ++i) {
        const Vec2& v = pts[i + 1];
        const Frame fr = table.frame(path.s[i]);
        const Vec2 in = (v - pts[i]).normalized();
        const double alpha = std::atan2(-in.dot(fr.normal), in.dot(fr.tangent));
        const double rho = (pts[i + 2] - v).norm();

        FocusChainRecord rec;
        rec.s = path.s[i];
        rec.kappa = fr.kappa;
        rec.alpha = alpha;
        rec.rho = rho;
        rec.f_before = f;
        f = mirror_step(f, fr.kappa, alpha, rho, z, tol);
        rec.f_after = f;
        chain.records.push_back(rec);
    }
    chain.result = f;
    return chain;
}

FocusRatio propagate_focus(const Table& table, const PolygonalPath& path, double z,
                           const Tolerances& tol) {
    return focus_chain(table, path, z, tol).result;
}

ConjugacyResult conjugacy_test(const Table& table, const PolygonalPath& path,
                               const Tolerances& tol) {
    const FocusRatio f = propagate_focus(table, path, 1.0, tol);
    double margin;
    if (f.is_finite()) {
        margin = f.value();
    } else {
        margin = std::numeric_limits<double>::infinity();
    }
    return ConjugacyResult{std::abs(margin) < tol.conjugacy, margin, f};
}

}  // namespace billiards
