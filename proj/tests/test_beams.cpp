#include "doctest.h"

#include <cmath>
#include <random>

#include "billiards/beams.hpp"
#include "billiards/errors.hpp"
#include "billiards/paths.hpp"
#include "oracles.hpp"

using namespace billiards;

TEST_CASE("pencil: geometry, envelope at the apex, non-degeneracy") {
    const LineFamily fam = pencil(Vec2(0, 0), 0.0, {-0.1, 0.1});
    const LineSample s = fam.at(0.0);
    CHECK((s.xi - Vec2(0, 0)).norm() < 1e-15);
    CHECK((s.v - Vec2(1, 0)).norm() < 1e-15);
    CHECK(s.dxi.norm() < 1e-15);
    CHECK(s.dv.norm() == doctest::Approx(1.0).epsilon(1e-14));

    for (double u : {-0.08, 0.0, 0.05}) {
        const FocusRatio f = envelope(fam, u);
        CHECK(f.is_finite());
        CHECK(std::abs(f.value()) < 1e-14);
        CHECK_FALSE(is_degenerate(fam, u).degenerate);
    }
}

TEST_CASE("envelope of parallel and tangent families") {
    const LineFamily parallel(
        [](double u) {
            return LineSample{Vec2(u, 0.0), Vec2(0.0, 1.0), Vec2(1.0, 0.0), Vec2(0.0, 0.0)};
        },
        {-0.5, 0.5});
    const FocusRatio f = envelope(parallel, 0.1);
    CHECK_FALSE(f.is_finite());
    CHECK_FALSE(is_degenerate(parallel, 0.1).degenerate);

    const LineFamily tangent(
        [](double u) {
            return LineSample{Vec2(std::cos(u), std::sin(u)), Vec2(-std::sin(u), std::cos(u)),
                              Vec2(-std::sin(u), std::cos(u)), Vec2(-std::cos(u), -std::sin(u))};
        },
        {-0.5, 0.5});
    const FocusRatio ft = envelope(tangent, 0.3);
    CHECK(ft.is_finite());
    CHECK(std::abs(ft.value()) < 1e-14);

    const LineFamily constant(
        [](double) {
            return LineSample{Vec2(0.0, 0.0), Vec2(1.0, 0.0), Vec2(0.0, 0.0), Vec2(0.0, 0.0)};
        },
        {-0.5, 0.5});
    CHECK(is_degenerate(constant, 0.0).degenerate);
}

TEST_CASE("reflect_family on the circle: retroreflection and half-radius focus") {
    const Table c = Table::circle(1.0);

    // pencil at the center: reflected family refocuses at the center,
    // i.e. envelope distance = radius past the bounce point
    const LineFamily center = pencil(Vec2(0, 0), 0.3, {-0.05, 0.05});
    const LineFamily r1 = reflect_family(c, center);
    const FocusRatio f1 = envelope(r1, 0.0);
    CHECK(f1.is_finite());
    CHECK(f1.value() == doctest::Approx(1.0).epsilon(1e-10));
    const LineSample rs = r1.at(0.0);
    CHECK((rs.xi + rs.v * f1.value() - Vec2(0, 0)).norm() < 1e-10);

    // vertical parallel beam onto the bottom point: focuses at sin(alpha)/(2 kappa) = 1/2
    const LineFamily vertical(
        [](double u) {
            return LineSample{Vec2(u, 0.0), Vec2(0.0, -1.0), Vec2(1.0, 0.0), Vec2(0.0, 0.0)};
        },
        {-0.02, 0.02});
    const LineFamily r2 = reflect_family(c, vertical);
    const FocusRatio f2 = envelope(r2, 0.0);
    CHECK(f2.is_finite());
    CHECK(f2.value() == doctest::Approx(0.5).epsilon(1e-9));

    for (double u : {-0.02, 0.0, 0.015}) {
        CHECK_FALSE(is_degenerate(r1, u).degenerate);
        CHECK_FALSE(is_degenerate(r2, u).degenerate);
    }
}

TEST_CASE("analytic family derivatives match finite differences after reflections") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> up(-0.3, 0.3);
    std::uniform_real_distribution<double> ua(0.0, kTwoPi);
    for (int trial = 0; trial < 8; ++trial) {
        const Table t = oracles::random_table(rng(), 4e-3);
        const Vec2 p(up(rng), up(rng));
        LineFamily fam = pencil(p, ua(rng), {-0.02, 0.02});
        for (int refl = 0; refl < 3; ++refl) {
            fam = reflect_family(t, fam);
            const double h = 1e-6;
            const LineSample mid = fam.at(0.0);
            const LineSample hip = fam.at(h);
            const LineSample lop = fam.at(-h);
            CHECK((mid.dxi - (hip.xi - lop.xi) / (2 * h)).norm() < 1e-6);
            CHECK((mid.dv - (hip.v - lop.v) / (2 * h)).norm() < 1e-6);
        }
    }
}

TEST_CASE("mirror_step: spec anchors") {
    // incoming parallel beam, kappa=1, alpha=pi/2: focus at 1/2
    const FocusRatio half = mirror_step(FocusRatio::infinite(), 1.0, M_PI_2, 0.0, 1.0);
    CHECK(half.is_finite());
    CHECK(half.value() == doctest::Approx(0.5).epsilon(1e-14));

    // beam through the bounce point refocuses at the point, then translates
    const FocusRatio zero = mirror_step(FocusRatio::finite(0.0), 2.3, 1.1, 0.7, 1.0);
    CHECK(zero.value() == doctest::Approx(-0.7).epsilon(1e-14));

    // z = 0 chain: pure translation by the rho's
    FocusRatio f = FocusRatio::finite(-0.4);
    const double rhos[] = {0.5, 1.2, 0.9};
    for (double r : rhos) f = mirror_step(f, 3.0, 0.8, r, 0.0);
    CHECK(f.value() == doctest::Approx(-(0.4 + 0.5 + 1.2 + 0.9)).epsilon(1e-12));

    CHECK_THROWS_AS(mirror_step(FocusRatio::finite(1.0), 1.0, 1e-9, 0.1, 1.0), GrazingError);
}

TEST_CASE("projective chain equals scalar recursion, including through infinity") {
    // scalar recursion with IEEE infinity arithmetic as the reference
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uk(0.5, 2.0);
    std::uniform_real_distribution<double> ua(0.3, M_PI - 0.3);
    std::uniform_real_distribution<double> ur(0.2, 1.5);
    for (int trial = 0; trial < 20; ++trial) {
        double f_scalar = -ur(rng);
        FocusRatio f = FocusRatio::finite(f_scalar);
        bool crossed_infinity = false;
        for (int i = 0; i < 6; ++i) {
            const double k = uk(rng), a = ua(rng), r = ur(rng);
            const double c = 2.0 * k / std::sin(a);
            const double inv = 1.0 / f_scalar + c;
            if (std::abs(inv) < 1e-12) crossed_infinity = true;
            f_scalar = 1.0 / inv - r;
            f = mirror_step(f, k, a, r, 1.0);
        }
        if (!crossed_infinity && std::isfinite(f_scalar)) {
            CHECK(f.is_finite());
            CHECK(std::abs(f.value() - f_scalar) <
                  1e-10 * std::max(1.0, std::abs(f_scalar)));
        }
    }

    // forced passage through infinity: 1/f + c = 0 at the second step
    FocusRatio g = FocusRatio::finite(-0.5);    // 1/f = -2
    g = mirror_step(g, 1.0, M_PI_2, 0.0, 1.0);  // c = 2: 1/f + c = 0 -> infinity
    CHECK_FALSE(g.is_finite());
    g = mirror_step(g, 1.0, M_PI_2, 0.3, 1.0);  // 1/inf = 0: f = 1/2 - 0.3
    CHECK(g.value() == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("propagate_focus: circle diameter refocuses at the center") {
    const Table c = Table::circle(1.0);
    const Vec2 center(0.0, 0.0);
    const PolygonalPath diam = make_path(c, center, center, {0.0});
    REQUIRE(certify(c, diam).accepted());

    const FocusChain chain = focus_chain(c, diam, 1.0);
    CHECK(chain.rho0 == doctest::Approx(1.0));
    REQUIRE(chain.records.size() == 1);
    // after the mirror the beam focuses at distance 1 = radius past the vertex
    const FocusRatio after_mirror = mirror_step(FocusRatio::finite(-1.0), 1.0, M_PI_2, 0.0, 1.0);
    CHECK(after_mirror.value() == doctest::Approx(1.0).epsilon(1e-12));

    const ConjugacyResult cr = conjugacy_test(c, diam);
    CHECK(cr.conjugate);
    CHECK(std::abs(cr.margin) < 1e-12);
}

TEST_CASE("propagate_focus with z = 0 equals minus the total length") {
    std::mt19937_64 rng(57);
    std::uniform_real_distribution<double> up(-0.35, 0.35);
    for (int trial = 0; trial < 10; ++trial) {
        const Table t = oracles::random_table(rng(), 4e-3);
        const Vec2 x(up(rng), up(rng)), y(up(rng), up(rng));
        if ((x - y).norm() < 0.05) continue;
        const auto found = max_length_path(t, x, y, 2 + trial % 3, 12, rng(), Exec::serial);
        if (found.empty()) continue;
        const FocusRatio f0 = propagate_focus(t, found[0].path, 0.0);
        REQUIRE(f0.is_finite());
        CHECK(std::abs(f0.value() + found[0].cert.length) < 1e-9);
    }
}

TEST_CASE("ellipse focus-to-focus is conjugate") {
    const Table e = Table::ellipse(2.0, 1.0);
    const double c = std::sqrt(3.0);
    const PolygonalPath ff = make_path(e, Vec2(-c, 0), Vec2(c, 0), {0.25});
    REQUIRE(certify(e, ff).accepted());
    const ConjugacyResult cr = conjugacy_test(e, ff);
    CHECK(cr.conjugate);
    CHECK(std::abs(cr.margin) < 1e-9);

    // oracle: rays shot from one focus in a spread of directions all pass
    // close to the other focus after one bounce
    for (double du : {-0.01, 0.005, 0.02}) {
        const Vec2 start(-c, 0.0);
        const Vec2 dir = (e.position(0.25) - start).normalized();
        const Vec2 dir2 = rotated(dir, du);
        const auto hit = first_hit(e, {start, dir2});
        const Vec2 out = reflect(dir2, e.frame(hit.s).normal);
        CHECK(point_line_distance(Vec2(c, 0), hit.point, hit.point + out) < 2e-4);
    }
}

TEST_CASE("mirror equation matches the finite-difference envelope (oracle)") {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> up(-0.3, 0.3);
    std::uniform_real_distribution<double> ua(0.0, kTwoPi);
    int checked = 0;
    for (int trial = 0; trial < 30 && checked < 15; ++trial) {
        const Table t = oracles::random_table(rng(), 5e-3);
        const Vec2 p(up(rng), up(rng));
        const double theta = ua(rng);
        BouncePoint hit;
        try {
            hit = first_hit(t, {p, unit_vector(theta)});
        } catch (const Error&) {
            continue;
        }
        if (hit.alpha < 0.2 || hit.alpha > M_PI - 0.2) continue;

        const Frame fr = t.frame(hit.s);
        const FocusRatio analytic =
            mirror_step(FocusRatio::finite(-hit.t), fr.kappa, hit.alpha, 0.0, 1.0);

        const auto raw = oracles::reflect_raw(t, oracles::raw_pencil(p, theta));
        const double fd = oracles::fd_envelope(raw, 0.0);
        REQUIRE(analytic.is_finite());
        CHECK(std::abs(analytic.value() - fd) < 1e-6);
        ++checked;
    }
    CHECK(checked >= 10);
}

TEST_CASE("Jacobian of (u,t) -> xi + t v is singular exactly at the envelope") {
    std::mt19937_64 rng(83);
    std::uniform_real_distribution<double> up(-0.3, 0.3);
    std::uniform_real_distribution<double> ua(0.0, kTwoPi);
    int checked = 0;
    for (int trial = 0; trial < 60 && checked < 25; ++trial) {
        const Table t = oracles::random_table(rng(), 4e-3);
        LineFamily fam = pencil(Vec2(up(rng), up(rng)), ua(rng), {-0.02, 0.02});
        try {
            fam = reflect_family(t, fam);
        } catch (const Error&) {
            continue;
        }
        const FocusRatio f = envelope(fam, 0.0);
        if (!f.is_finite() || std::abs(f.value()) > 3.0) continue;

        const LineSample s = fam.at(0.0);
        auto det_at = [&](double tt) {
            Mat2 j;
            j.col(0) = s.dxi + tt * s.dv;
            j.col(1) = s.v;
            return std::abs(j.determinant());
        };
        CHECK(det_at(f.value()) < 1e-8);
        CHECK(det_at(f.value() + 0.1) > 1e-4);
        CHECK(det_at(f.value() - 0.1) > 1e-4);
        ++checked;
    }
    CHECK(checked >= 20);
}

TEST_CASE("reflected families respond O(h) to table perturbations (stability)") {
    const Table c = Table::circle(1.0);
    const LineFamily fam = pencil(Vec2(-0.2, 0.1), 0.4, {-0.02, 0.02});
    const BouncePoint hit = first_hit(c, {Vec2(-0.2, 0.1), unit_vector(0.4)});
    const LineSample base = reflect_family(c, fam).at(0.0);

    double deltas[3];
    const double hs[3] = {1e-3, 1e-4, 1e-5};
    for (int i = 0; i < 3; ++i) {
        const Table pert = c.with_bump({hit.s, 0.06, hs[i], 0.0, 0.0});
        const LineSample moved = reflect_family(pert, fam).at(0.0);
        deltas[i] = (moved.xi - base.xi).norm() + (moved.v - base.v).norm();
    }
    CHECK(deltas[0] > 0.0);
    CHECK(deltas[1] == doctest::Approx(deltas[0] * 0.1).epsilon(0.2));
    CHECK(deltas[2] == doctest::Approx(deltas[1] * 0.1).epsilon(0.2));
}

TEST_CASE("generic perturbed-circle pairs are not conjugate along one-bounce paths") {
    std::mt19937_64 rng(97);
    std::uniform_real_distribution<double> up(-0.4, 0.4);
    int nonconjugate = 0, total = 0;
    while (total < 20) {
        const Table t = oracles::random_table(rng(), 8e-3);
        const Vec2 x(up(rng), up(rng)), y(up(rng), up(rng));
        if ((x - y).norm() < 0.1) continue;
        const auto found = max_length_path(t, x, y, 1, 8, rng(), Exec::serial);
        if (found.empty()) continue;
        ++total;
        const ConjugacyResult cr = conjugacy_test(t, found[0].path);
        if (!cr.conjugate && std::abs(cr.margin) > 1e-3) ++nonconjugate;
    }
    CHECK(nonconjugate >= 19);
}
