#include "billiards/paths.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include <Eigen/Dense>

#include "billiards/errors.hpp"

namespace billiards {

namespace {

constexpr double kMinSeparation = 1e-12;

}  // namespace

PolygonalPath make_path(const Table& table, const Vec2& x, const Vec2& y,
                        const std::vector<double>& s) {
    PolygonalPath p;
    p.x = x;
    p.y = y;
    p.s.reserve(s.size());
    p.pts.reserve(s.size());
    for (double si : s) {
        p.s.push_back(wrap01(si));
        p.pts.push_back(table.position(si));
    }
    return p;
}

PathCertificate certify(const Table& table, const PolygonalPath& path) {
    PathCertificate c;
    c.min_alpha = M_PI_2;
    c.residual = reflection_residual(table, path, &c.min_alpha);
    c.length = path.length();
    return c;
}

LengthGradient path_length(const Table& table, const Vec2& x, const Vec2& y,
                           const std::vector<double>& s) {
    const int m = static_cast<int>(s.size());
    if (m < 1) throw Error("path_length needs at least one vertex");

    std::vector<Vec2> v(m), dv(m);
    for (int i = 0; i < m; ++i) {
        const auto d = table.eval(s[i], 1);
        v[i] = d[0];
        dv[i] = d[1];
    }

    LengthGradient out;
    out.grad.assign(m, 0.0);
    out.length = 0.0;
    for (int i = 0; i <= m; ++i) {
        const Vec2& a = (i == 0) ? x : v[i - 1];
        const Vec2& b = (i == m) ? y : v[i];
        const Vec2 d = b - a;
        const double dist = d.norm();
        if (dist < kMinSeparation) {
            throw DegenerateConfigurationError("coincident consecutive path points");
        }
        out.length += dist;
        const Vec2 u = d / dist;
        if (i > 0) out.grad[i - 1] -= u.dot(dv[i - 1]);
        if (i < m) out.grad[i] += u.dot(dv[i]);
    }
    return out;
}

namespace {

// Analytic Hessian of the length functional; tridiagonal since only
// consecutive vertices interact.
Eigen::MatrixXd length_hessian(const Table& table, const Vec2& x, const Vec2& y,
                               const std::vector<double>& s) {
    const int m = static_cast<int>(s.size());
    std::vector<Vec2> v(m), d1(m), d2(m);
    for (int i = 0; i < m; ++i) {
        const auto d = table.eval(s[i], 2);
        v[i] = d[0];
        d1[i] = d[1];
        d2[i] = d[2];
    }
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i <= m; ++i) {
        const Vec2& a = (i == 0) ? x : v[i - 1];
        const Vec2& b = (i == m) ? y : v[i];
        const Vec2 diff = b - a;
        const double dist = diff.norm();
        if (dist < kMinSeparation) {
            throw DegenerateConfigurationError("coincident consecutive path points");
        }
        const Vec2 u = diff / dist;
        // u points at vertex i (the segment's right endpoint) and away from
        // vertex i-1 (its left endpoint)
        if (i < m) {
            h(i, i) += u.dot(d2[i]) + (d1[i].squaredNorm() - std::pow(u.dot(d1[i]), 2)) / dist;
        }
        if (i > 0) {
            h(i - 1, i - 1) +=
                (-u).dot(d2[i - 1]) +
                (d1[i - 1].squaredNorm() - std::pow(u.dot(d1[i - 1]), 2)) / dist;
        }
        if (i > 0 && i < m) {
            const double cross_term =
                -(d1[i - 1].dot(d1[i]) - u.dot(d1[i - 1]) * u.dot(d1[i])) / dist;
            h(i - 1, i) += cross_term;
            h(i, i - 1) += cross_term;
        }
    }
    return h;
}

struct AscentResult {
    std::vector<double> s;
    double length;
    bool usable;
};

AscentResult ascend(const Table& table, const Vec2& x, const Vec2& y, std::vector<double> s) {
    const int m = static_cast<int>(s.size());
    auto eval = [&](const std::vector<double>& cand) -> std::optional<LengthGradient> {
        try {
            return path_length(table, x, y, cand);
        } catch (const DegenerateConfigurationError&) {
            return std::nullopt;
        }
    };

    auto cur = eval(s);
    if (!cur) return {s, 0.0, false};

    double step = 0.02;
    for (int it = 0; it < 250; ++it) {
        double gmax = 0.0;
        for (double g : cur->grad) gmax = std::max(gmax, std::abs(g));
        if (gmax < 1e-6) break;

        bool accepted = false;
        while (step > 1e-14) {
            std::vector<double> cand(m);
            for (int i = 0; i < m; ++i) cand[i] = wrap01(s[i] + step * cur->grad[i]);
            auto trial = eval(cand);
            if (trial && trial->length > cur->length) {
                s = std::move(cand);
                cur = std::move(trial);
                step = std::min(step * 1.6, 0.05);
                accepted = true;
                break;
            }
            step *= 0.4;
        }
        if (!accepted) break;
    }

    // Newton polish on grad L = 0
    for (int it = 0; it < 40; ++it) {
        auto lg = eval(s);
        if (!lg) return {s, 0.0, false};
        Eigen::VectorXd g(m);
        for (int i = 0; i < m; ++i) g(i) = lg->grad[i];
        if (g.lpNorm<Eigen::Infinity>() < 1e-13) break;

        Eigen::MatrixXd h;
        try {
            h = length_hessian(table, x, y, s);
        } catch (const DegenerateConfigurationError&) {
            return {s, 0.0, false};
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(h);
        if (!lu.isInvertible()) break;
        Eigen::VectorXd delta = lu.solve(-g);
        const double dmax = delta.lpNorm<Eigen::Infinity>();
        if (dmax > 0.03) delta *= 0.03 / dmax;
        for (int i = 0; i < m; ++i) s[i] = wrap01(s[i] + delta(i));
        if (dmax < 1e-14) break;
    }

    auto fin = eval(s);
    if (!fin) return {s, 0.0, false};
    return {s, fin->length, true};
}

std::vector<std::vector<double>> build_seeds(int m, int starts, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<std::vector<double>> seeds;
    seeds.reserve(starts);
    for (int i = 0; i < starts; ++i) {
        std::vector<double> s(m);
        const int family = i % 3;
        if (family == 0) {
            // arithmetic progression: winding-number seeds
            const int q = 1 + (i / 3) % std::max(1, m);
            const double s0 = uni(rng);
            const double sign = (i / 3) % 2 == 0 ? 1.0 : -1.0;
            for (int j = 0; j < m; ++j) {
                s[j] = wrap01(s0 + sign * (j + 1) * static_cast<double>(q) / (m + 1));
            }
        } else if (family == 1) {
            // stratified jittered lattice
            const double s0 = uni(rng);
            for (int j = 0; j < m; ++j) s[j] = wrap01(s0 + (j + uni(rng)) / m);
        } else {
            for (int j = 0; j < m; ++j) s[j] = uni(rng);
        }
        seeds.push_back(std::move(s));
    }
    return seeds;
}

}  // namespace

std::vector<CertifiedPath> max_length_path(const Table& table, const Vec2& x, const Vec2& y,
                                           int m, int starts, std::uint64_t seed, Exec exec,
                                           const Tolerances& tol) {
    if (m < 1) throw Error("max_length_path needs m >= 1");
    if (starts < 1) starts = 1;

    const auto seeds = build_seeds(m, starts, seed);
    std::vector<AscentResult> results(starts);

    if (exec == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (int i = 0; i < starts; ++i) results[i] = ascend(table, x, y, seeds[i]);
    } else {
        for (int i = 0; i < starts; ++i) results[i] = ascend(table, x, y, seeds[i]);
    }

    struct Candidate {
        std::vector<double> s;
        double length;
        int origin;
    };
    std::vector<Candidate> certified;
    for (int i = 0; i < starts; ++i) {
        if (!results[i].usable) continue;
        certified.push_back({results[i].s, results[i].length, i});
    }
    std::sort(certified.begin(), certified.end(), [](const Candidate& a, const Candidate& b) {
        if (a.length != b.length) return a.length > b.length;
        if (a.s != b.s) return a.s < b.s;
        return a.origin < b.origin;
    });

    std::vector<CertifiedPath> out;
    for (const Candidate& c : certified) {
        bool duplicate = false;
        for (const CertifiedPath& kept : out) {
            double d = 0.0;
            for (int j = 0; j < m; ++j) d = std::max(d, circle_dist(c.s[j], kept.path.s[j]));
            if (d < tol.path_identity) {
                duplicate = true;
                break;
            }
        }
        if (duplicate) continue;
        PolygonalPath p = make_path(table, x, y, c.s);
        PathCertificate cert = certify(table, p);
        if (cert.accepted(tol)) out.push_back({std::move(p), cert});
    }
    return out;
}

ShootEvaluator::ShootEvaluator(const Table& table, const Vec2& p, double theta, int m,
                               const Tolerances& tol)
    : table_(&table), p_(p), theta_(theta), m_(m),
      family_(pencil(p, theta, Interval{-0.1, 0.1})), tol_(tol) {
    auto shared = std::make_shared<const Table>(table);
    for (int i = 0; i < m; ++i) family_ = family_.with_reflection(shared);
    base_ = trace(table, RayState{p, unit_vector(theta)}, m, tol);
}

TraceResult ShootEvaluator::trace_at(double u) const {
    return trace(*table_, RayState{p_, unit_vector(theta_ + u)}, m_, tol_);
}

ShootResult solve_shooting(const Table& table, const Vec2& p, const Vec2& q, int m, double theta0,
                           const Tolerances& tol) {
    ShootResult res;
    std::optional<ShootEvaluator> ev;
    try {
        ev.emplace(table, p, theta0, m, tol);
    } catch (const GrazingError&) {
        res.status = ShootStatus::grazing;
        return res;
    } catch (const GeometryError&) {
        res.status = ShootStatus::no_convergence;
        return res;
    }

    double u = 0.0;
    double t;
    LineSample sample;
    try {
        sample = ev->line(0.0);
    } catch (const Error&) {
        res.status = ShootStatus::grazing;
        return res;
    }
    t = (q - sample.xi).dot(sample.v);

    for (int iter = 0; iter < tol.shooting_max_iters; ++iter) {
        res.iterations = iter + 1;
        const Vec2 f = sample.xi + t * sample.v - q;
        res.residual = f.norm();

        Mat2 jac;
        jac.col(0) = sample.dxi + t * sample.dv;
        jac.col(1) = sample.v;
        const double det = jac.determinant();
        const double scale = std::max(1.0, jac.col(0).norm());
        if (std::abs(det) < 1e-8 * scale) {
            res.status = ShootStatus::singular_jacobian;
            res.u_star = u;
            res.t_star = t;
            return res;
        }

        if (res.residual < tol.shooting_residual) {
            res.u_star = u;
            res.t_star = t;
            break;
        }

        Vec2 delta = jac.partialPivLu().solve(-f);
        const double dmag = std::max(std::abs(delta.x()),
                                     std::abs(delta.y()) / std::max(1.0, table.diameter()));
        if (dmag > tol.newton_damping) delta *= tol.newton_damping / dmag;

        bool stepped = false;
        for (int half = 0; half < 6; ++half) {
            try {
                sample = ev->line(u + delta.x());
                u += delta.x();
                t += delta.y();
                stepped = true;
                break;
            } catch (const Error&) {
                delta *= 0.5;
            }
        }
        if (!stepped) {
            res.status = ShootStatus::grazing;
            return res;
        }
    }

    if (res.residual >= tol.shooting_residual) {
        res.status = ShootStatus::no_convergence;
        return res;
    }

    // Cor. 4.4 window: the endpoint must be reached after reflection m and
    // before (or at) reflection m+1.
    if (t <= tol.t_min && m > 0) {
        res.status = ShootStatus::outside_bounce_window;
        return res;
    }
    if (m >= 0) {
        try {
            const BouncePoint next = exit_hit(table, sample.xi, sample.v, tol);
            if (t > next.t + 1e-9) {
                res.status = ShootStatus::outside_bounce_window;
                return res;
            }
        } catch (const Error&) {
            // tangential continuation; accept the converged endpoint
        }
    }

    TraceResult tr;
    try {
        tr = ev->trace_at(u);
    } catch (const GrazingError&) {
        res.status = ShootStatus::grazing;
        return res;
    }
    std::vector<double> s;
    s.reserve(tr.bounces.size());
    for (const BouncePoint& b : tr.bounces) s.push_back(b.s);
    res.path = make_path(table, p, q, s);
    res.converged = true;
    res.status = ShootStatus::converged;
    return res;
}

std::vector<CertifiedPath> enumerate_paths(const Table& table, const Vec2& x, const Vec2& y,
                                           int max_bounces, int starts_per_m, std::uint64_t seed,
                                           Exec exec, const Tolerances& tol) {
    if ((x - y).norm() < kMinSeparation) throw Error("enumerate_paths needs x != y");
    std::vector<CertifiedPath> out;

    PolygonalPath direct = make_path(table, x, y, {});
    out.push_back({direct, certify(table, direct)});

    for (int m = 1; m <= max_bounces; ++m) {
        auto found = max_length_path(table, x, y, m, starts_per_m, seed + 0x9e3779b97f4a7c15ULL * m,
                                     exec, tol);
        for (auto& cp : found) out.push_back(std::move(cp));
    }
    return out;
}

}  // namespace billiards
