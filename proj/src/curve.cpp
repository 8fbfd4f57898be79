#include "billiards/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "billiards/errors.hpp"
#include "billiards/taylor.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace billiards {

namespace {

template <int N>
struct JetVec {
    Jet<N> x, y;
};

template <int N>
Jet<N> truncated(const Jet<N + 1>& f) {
    Jet<N> r;
    for (int k = 0; k <= N; ++k) r.c[k] = f.c[k];
    return r;
}

template <int N>
Jet<N> derivative_jet(const Jet<N + 1>& f) {
    Jet<N> r;
    for (int k = 0; k <= N; ++k) r.c[k] = (k + 1) * f.c[k + 1];
    return r;
}

template <int N>
Jet<N> fourier_jet(const std::vector<double>& coeffs, double s) {
    Jet<N> acc(coeffs.empty() ? 0.0 : coeffs[0]);
    const int harmonics = static_cast<int>((coeffs.size() - 1) / 2);
    for (int k = 1; k <= harmonics; ++k) {
        Jet<N> cj, sj;
        trig_jets<N>(kTwoPi * k, s, cj, sj);
        acc += coeffs[2 * k - 1] * cj + coeffs[2 * k] * sj;
    }
    return acc;
}

// Sum of active bump offsets as a jet in s; zero jet (and no floating
// work) when s is outside every support.
template <int N>
bool bump_offset_jet(const std::vector<NormalBump>& bumps, double s, Jet<N>& out) {
    bool active = false;
    for (const NormalBump& b : bumps) {
        const double ds = circle_diff(s, b.center_s);
        if (std::abs(ds) >= b.half_width) continue;
        active = true;
        Jet<N> x = Jet<N>::variable(ds) / b.half_width;
        Jet<N> mollifier = exp(1.0 - 1.0 / (1.0 - x * x));
        Jet<N> nx = b.half_width * x;
        Jet<N> poly = Jet<N>(b.value_coeff) + b.slope_coeff * nx + (0.5 * b.curv_coeff) * (nx * nx);
        out += mollifier * poly;
    }
    return active;
}

template <int N>
JetVec<N> eval_impl(const std::vector<double>& fx, const std::vector<double>& fy,
                    const std::vector<NormalBump>& bumps, double s) {
    Jet<N + 1> bx = fourier_jet<N + 1>(fx, s);
    Jet<N + 1> by = fourier_jet<N + 1>(fy, s);

    Jet<N> offset;
    if (!bump_offset_jet<N>(bumps, s, offset)) {
        return {truncated<N>(bx), truncated<N>(by)};
    }

    Jet<N> dx = derivative_jet<N>(bx);
    Jet<N> dy = derivative_jet<N>(by);
    Jet<N> speed = sqrt(dx * dx + dy * dy);
    Jet<N> n0x = -dy / speed;
    Jet<N> n0y = dx / speed;
    return {truncated<N>(bx) + offset * n0x, truncated<N>(by) + offset * n0y};
}

template <int N>
void fill_derivs(const JetVec<N>& jv, std::array<Vec2, 5>& out) {
    for (int j = 0; j <= N; ++j) out[j] = Vec2(jv.x.derivative(j), jv.y.derivative(j));
}

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double d1 = cross2(b - a, c - a);
    const double d2 = cross2(b - a, d - a);
    const double d3 = cross2(d - c, a - c);
    const double d4 = cross2(d - c, b - c);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

}  // namespace

Table::Table(std::vector<double> fourier_x, std::vector<double> fourier_y,
             std::vector<NormalBump> bumps, int validation_grid)
    : fx_(std::move(fourier_x)), fy_(std::move(fourier_y)), bumps_(std::move(bumps)),
      grid_(validation_grid) {
    if (fx_.empty()) fx_.push_back(0.0);
    if (fy_.empty()) fy_.push_back(0.0);
    if (grid_ < 16) grid_ = 16;
    for (const NormalBump& b : bumps_) {
        if (!(b.half_width > 0.0) || b.half_width >= 0.5) {
            throw Error("bump half_width must lie in (0, 0.5)");
        }
    }
    compute_extent();
}

void Table::compute_extent() {
    const int n = std::max(grid_, 512);
    Vec2 lo(std::numeric_limits<double>::max(), std::numeric_limits<double>::max());
    Vec2 hi = -lo;
    for (int i = 0; i < n; ++i) {
        const Vec2 p = position(static_cast<double>(i) / n);
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    bbox_min_ = lo;
    bbox_max_ = hi;
    diameter_ = (hi - lo).norm();
}

Table Table::circle(double radius) {
    return Table({0.0, radius, 0.0}, {0.0, 0.0, radius});
}

Table Table::ellipse(double a, double b) {
    return Table({0.0, a, 0.0}, {0.0, 0.0, b});
}

Table Table::with_bump(const NormalBump& bump) const {
    std::vector<NormalBump> bs = bumps_;
    bs.push_back(bump);
    return Table(fx_, fy_, std::move(bs), grid_);
}

std::array<Vec2, 5> Table::eval(double s, int order) const {
    if (order < 0 || order > 4) {
        throw UnsupportedOrderError("derivative order must be in 0..4, got " +
                                    std::to_string(order));
    }
    s = wrap01(s);
    std::array<Vec2, 5> out{};
    switch (order) {
        case 0: fill_derivs<0>(eval_impl<0>(fx_, fy_, bumps_, s), out); break;
        case 1: fill_derivs<1>(eval_impl<1>(fx_, fy_, bumps_, s), out); break;
        case 2: fill_derivs<2>(eval_impl<2>(fx_, fy_, bumps_, s), out); break;
        case 3: fill_derivs<3>(eval_impl<3>(fx_, fy_, bumps_, s), out); break;
        case 4: fill_derivs<4>(eval_impl<4>(fx_, fy_, bumps_, s), out); break;
    }
    return out;
}

Vec2 Table::position(double s) const {
    const auto jv = eval_impl<0>(fx_, fy_, bumps_, wrap01(s));
    return Vec2(jv.x.value(), jv.y.value());
}

Frame Table::frame(double s) const {
    const auto d = eval(s, 2);
    const double speed = d[1].norm();
    const Vec2 t = d[1] / speed;
    const double kappa = cross2(d[1], d[2]) / (speed * speed * speed);
    return Frame{t, rot90(t), kappa, speed};
}

TubularCoords Table::tubular(const Vec2& p) const {
    const int coarse = 128;
    double best_s = 0.0;
    double best_d2 = std::numeric_limits<double>::max();
    for (int i = 0; i < coarse; ++i) {
        const double s = static_cast<double>(i) / coarse;
        const double d2 = (p - position(s)).squaredNorm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best_s = s;
        }
    }

    double s = best_s;
    bool converged = false;
    for (int it = 0; it < 60; ++it) {
        const auto d = eval(s, 2);
        const Vec2 r = p - d[0];
        const double g = r.dot(d[1]);
        const double gp = -d[1].squaredNorm() + r.dot(d[2]);
        if (gp == 0.0) break;
        double step = -g / gp;
        step = std::clamp(step, -0.25 / coarse * 8, 0.25 / coarse * 8);
        s = wrap01(s + step);
        if (std::abs(step) < 1e-15) {
            converged = true;
            break;
        }
    }
    {
        const auto d = eval(s, 1);
        const double g = (p - d[0]).dot(d[1]);
        if (std::abs(g) <= 1e-10 * (1.0 + diameter_)) converged = true;
    }
    if (!converged) {
        throw ProjectionError("tubular projection did not converge");
    }
    const Frame f = frame(s);
    return TubularCoords{s, (p - position(s)).dot(f.normal)};
}

ValidationReport Table::validate() const {
    ValidationReport rep;
    const int n = grid_;

    std::vector<Vec2> pts(n);
    rep.min_kappa = std::numeric_limits<double>::max();
    rep.min_speed = std::numeric_limits<double>::max();
    for (int i = 0; i < n; ++i) {
        const double s = static_cast<double>(i) / n;
        const Frame f = frame(s);
        pts[i] = position(s);
        if (f.kappa < rep.min_kappa) {
            rep.min_kappa = f.kappa;
            rep.min_kappa_s = s;
        }
        if (f.speed < rep.min_speed) {
            rep.min_speed = f.speed;
            rep.min_speed_s = s;
        }
    }

    double area2 = 0.0;
    for (int i = 0; i < n; ++i) area2 += cross2(pts[i], pts[(i + 1) % n]);
    rep.ccw = area2 > 0.0;

    bool crossing = false;
    int crossing_i = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 64)
#endif
    for (int i = 0; i < n; ++i) {
        if (crossing) continue;
        for (int j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;  // adjacent around the wrap
            if (segments_intersect(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n])) {
#ifdef _OPENMP
#pragma omp critical
#endif
                {
                    crossing = true;
                    crossing_i = i;
                }
                break;
            }
        }
    }
    rep.simple = !crossing;

    if (rep.min_kappa <= 0.0) {
        rep.failures.push_back({"positive_curvature", rep.min_kappa_s, rep.min_kappa});
    }
    if (rep.min_speed <= 0.0) {
        rep.failures.push_back({"regular_parametrization", rep.min_speed_s, rep.min_speed});
    }
    if (!rep.simple) {
        rep.failures.push_back(
            {"simple_curve", static_cast<double>(crossing_i) / n, 0.0});
    }
    if (!rep.ccw) {
        rep.failures.push_back({"counterclockwise_orientation", 0.0, area2});
    }
    rep.valid = rep.failures.empty();
    return rep;
}

namespace {

// Cumulative arclength on a dense uniform grid; inverted by linear
// interpolation (dense enough that interpolation error is far below the
// distance tolerances used downstream).
struct ArclengthMap {
    explicit ArclengthMap(const Table& t, int samples) : n(samples), cum(samples + 1, 0.0) {
        const double h = 1.0 / n;
        double acc = 0.0;
        double prev = t.eval(0.0, 1)[1].norm();
        for (int i = 0; i < n; ++i) {
            const double mid = t.eval((i + 0.5) * h, 1)[1].norm();
            const double next = t.eval((i + 1.0) * h, 1)[1].norm();
            acc += h / 6.0 * (prev + 4.0 * mid + next);
            cum[i + 1] = acc;
            prev = next;
        }
        total = acc;
    }

    // parameter s such that arclength(s) = u * total, u in [0,1)
    double s_at(double u) const {
        const double target = wrap01(u) * total;
        auto it = std::upper_bound(cum.begin(), cum.end(), target);
        int i = static_cast<int>(it - cum.begin()) - 1;
        i = std::clamp(i, 0, n - 1);
        const double seg = cum[i + 1] - cum[i];
        const double frac = seg > 0.0 ? (target - cum[i]) / seg : 0.0;
        return (i + frac) / n;
    }

    int n;
    double total;
    std::vector<double> cum;
};

struct CkSample {
    Vec2 f0, f1, f2;  // constant-speed position, velocity, acceleration
};

CkSample ck_sample(const Table& t, double s, double len) {
    const Frame f = t.frame(s);
    return CkSample{t.position(s), len * f.tangent, len * len * f.kappa * f.normal};
}

double ck_compare(const CkSample& a, const CkSample& b, int k) {
    double d = (a.f0 - b.f0).norm();
    if (k >= 1) d = std::max(d, (a.f1 - b.f1).norm());
    if (k >= 2) d = std::max(d, (a.f2 - b.f2).norm());
    return d;
}

}  // namespace

double ck_distance(const Table& a, const Table& b, int k, int grid) {
    if (k < 0 || k > 2) throw UnsupportedOrderError("ck_distance supports k in 0..2");
    if (grid < 8) grid = 8;

    const ArclengthMap ma(a, std::max(2048, 4 * grid));
    const ArclengthMap mb(b, std::max(2048, 4 * grid));

    std::vector<CkSample> sa(grid), sb(grid);
    for (int i = 0; i < grid; ++i) {
        const double u = static_cast<double>(i) / grid;
        sa[i] = ck_sample(a, ma.s_at(u), ma.total);
        sb[i] = ck_sample(b, mb.s_at(u), mb.total);
    }

    double best = std::numeric_limits<double>::max();
    for (int shift = 0; shift < grid; ++shift) {
        double dev = 0.0;
        for (int i = 0; i < grid; ++i) {
            dev = std::max(dev, ck_compare(sa[(i + shift) % grid], sb[i], k));
            if (dev >= best) break;
        }
        best = std::min(best, dev);
    }
    return best;
}

double ck_deviation(const Table& a, const Table& b, int k, int samples,
                    const std::vector<double>& shift_candidates) {
    if (k < 0 || k > 2) throw UnsupportedOrderError("ck_deviation supports k in 0..2");
    const ArclengthMap ma(a, std::max(2048, samples));
    const ArclengthMap mb(b, std::max(2048, samples));

    double best = std::numeric_limits<double>::max();
    for (double shift : shift_candidates) {
        double dev = 0.0;
        for (int i = 0; i < samples; ++i) {
            const double u = static_cast<double>(i) / samples;
            const CkSample xa = ck_sample(a, ma.s_at(wrap01(u + shift)), ma.total);
            const CkSample xb = ck_sample(b, mb.s_at(u), mb.total);
            dev = std::max(dev, ck_compare(xa, xb, k));
        }
        best = std::min(best, dev);
    }
    return best;
}

}  // namespace billiards
