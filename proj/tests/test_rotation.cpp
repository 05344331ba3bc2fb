#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kere/rng.hpp"
#include "kere/rotation.hpp"

using namespace kere;

TEST_CASE("rotation number of rigid rotations") {
    RotationNumber rho = rotation_number(CircleMap::rotation(0.3), 0.1, 10000);
    CHECK(std::fabs(rho.value - 0.3) <= 1e-4);
    CHECK(rho.error_bound == doctest::Approx(1e-4));
}

TEST_CASE("rotation number vanishes at a fixed point") {
    // monotone lift with F(0) = 0
    CircleMap c = CircleMap::from_lift(
        [](double x) { return x + 0.05 * (1.0 - std::cos(2.0 * M_PI * x)); });
    RotationNumber rho = rotation_number(c, 0.25, 10000);
    CHECK(std::min(rho.value, 1.0 - rho.value) <= 1e-4);
}

TEST_CASE("rotation number of powers") {
    Rng rng(5);
    for (int k = 0; k < 12; ++k) {
        double a = rng.uniform(0.02, 0.98);
        CircleMap c = CircleMap::rotation(a);
        double r1 = rotation_number(c, 0.0, 10000).value;
        double r3 = rotation_number(c.power(3), 0.0, 10000).value;
        CHECK(circle_dist(r3, reduce_mod1(3.0 * r1)) <= 3e-4);
    }
}

TEST_CASE("degenerate lifts are rejected") {
    CHECK_THROWS_AS(CircleMap::from_lift([](double x) { return x + 0.3 + 0.2 * x; }),
                    NotDegreeOne);
    CHECK_THROWS_AS(
        CircleMap::from_lift([](double x) { return x + 0.5 * std::sin(2.0 * M_PI * x) * 2.0; }),
        NotDegreeOne);
    CHECK_THROWS_AS(rotation_number(CircleMap::rotation(0.3), 0.0, 50), Error);
}

TEST_CASE("translation vector of rigid translations is exact") {
    SurfaceMap tau = SurfaceMap::torus_translation(0.3123, 0.7779);
    TranslationVector tv = translation_vector(tau, Vec2{0.1, 0.9}, 1000);
    CHECK(std::fabs(tv.value[0] - 0.3123) <= 1e-12);
    CHECK(std::fabs(tv.value[1] - 0.7779) <= 1e-12);
    CHECK(tv.spread <= 1e-12);
}

TEST_CASE("alternative lifts shift the translation vector by the lattice") {
    SurfaceMap tau = SurfaceMap::torus_translation(0.25, 0.6);
    TranslationVector base = translation_vector(tau, Vec2{0.0, 0.0}, 500);
    TranslationVector shifted = translation_vector(tau, Vec2{0.0, 0.0}, 500, {2, -1});
    CHECK(shifted.value[0] - base.value[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(shifted.value[1] - base.value[1] == doctest::Approx(-1.0).epsilon(1e-12));
    // the reduced class is lift independent
    CHECK(circle_dist(reduce_mod1(base.value[0]), reduce_mod1(shifted.value[0])) <= 1e-9);
    CHECK(circle_dist(reduce_mod1(base.value[1]), reduce_mod1(shifted.value[1])) <= 1e-9);
}

TEST_CASE("translation vector requires a trivial lattice action") {
    CHECK_THROWS_AS(
        translation_vector(SurfaceMap::torus_reversing_type1(0.3), Vec2{0, 0}, 100),
        NonTrivialHomology);
    CHECK_THROWS_AS(translation_vector(SurfaceMap::annulus_rotation(0.3), Vec2{0, 0}, 100),
                    NoLift);
}

TEST_CASE("rotation vector reduces mod one") {
    Vec2 r1 = rotation_vector(SurfaceMap::torus_translation(0.3, 0.7), 500);
    CHECK(circle_dist(r1[0], 0.3) <= 1e-9);
    CHECK(circle_dist(r1[1], 0.7) <= 1e-9);
    Vec2 r2 = rotation_vector(SurfaceMap::torus_translation(1.3, -0.3), 500);
    CHECK(circle_dist(r2[0], 0.3) <= 1e-9);
    CHECK(circle_dist(r2[1], 0.7) <= 1e-9);
}

TEST_CASE("oriented Klein lift squares to a vertical translation") {
    double a = 0.3183098861;
    SurfaceMap lift = SurfaceMap::torus_translation(0.0, a);  // oriented lift of the phi family
    SurfaceMap sq = SurfaceMap::compose({lift, lift});
    Vec2 rho = rotation_vector(sq, 2000);
    CHECK(circle_dist(rho[0], 0.0) <= 1e-9);
    CHECK(circle_dist(rho[1], reduce_mod1(2 * a)) <= 1e-9);
}

TEST_CASE("base point spread obeys the uniform bound") {
    SurfaceMap f = SurfaceMap::conjugate(
        SurfaceMap::compose({SurfaceMap::torus_warp_s(0.08, 0.7),
                             SurfaceMap::torus_warp_t(0.06, 0.3)}),
        SurfaceMap::torus_translation(0.6180339887, 0.4142135624));
    const long horizon = 1000;
    double M = lift_displacement_bound(f);
    TranslationVector tv = translation_vector(f, Vec2{0.2, 0.4}, horizon);
    CHECK(tv.spread <= 4.0 * M / double(horizon));
}

TEST_CASE("additivity on commuting pairs") {
    Rng rng(17);
    SurfaceMap W = SurfaceMap::compose(
        {SurfaceMap::torus_warp_s(0.07, 1.1), SurfaceMap::torus_warp_t(0.05, 0.4)});
    for (int k = 0; k < 10; ++k) {
        SurfaceMap g = SurfaceMap::conjugate(
            W, SurfaceMap::torus_translation(rng.uniform(), rng.uniform()));
        SurfaceMap h = SurfaceMap::conjugate(
            W, SurfaceMap::torus_translation(rng.uniform(), rng.uniform()));
        SurfaceMap gh = SurfaceMap::compose({h, g});
        const long horizon = 800;
        TranslationVector tg = translation_vector(g, Vec2{0.3, 0.3}, horizon);
        TranslationVector th = translation_vector(h, Vec2{0.3, 0.3}, horizon);
        TranslationVector tgh = translation_vector(gh, Vec2{0.3, 0.3}, horizon);
        double allowance = tg.spread + th.spread + tgh.spread + 2e-3;
        CHECK(circle_dist(reduce_mod1(tgh.value[0]),
                          reduce_mod1(tg.value[0] + th.value[0])) <= allowance);
        CHECK(circle_dist(reduce_mod1(tgh.value[1]),
                          reduce_mod1(tg.value[1] + th.value[1])) <= allowance);
    }
}

TEST_CASE("integer linear conjugation maps the rotation vector") {
    Rng rng(23);
    Mat2i P{{{2, 1}, {1, 1}}};
    SurfaceMap LP = SurfaceMap::torus_linear(P);
    for (int k = 0; k < 10; ++k) {
        Vec2 v{rng.uniform(), rng.uniform()};
        SurfaceMap f = SurfaceMap::torus_translation(v[0], v[1]);
        SurfaceMap conj = SurfaceMap::conjugate(LP, f);
        Vec2 got = rotation_vector(conj, 400);
        Vec2 want = P.apply(v);
        CHECK(circle_dist(got[0], reduce_mod1(want[0])) <= 1e-9);
        CHECK(circle_dist(got[1], reduce_mod1(want[1])) <= 1e-9);
    }
}

TEST_CASE("zero vector versus fixed point diagnostic") {
    ZeroVectorDiagnostic a =
        vector_is_zero_iff_fixed_point_check(SurfaceMap::identity(Surface::Torus), 200, 16, 1e-6);
    CHECK(a.theta_zero);
    CHECK(a.fixed_point_found);
    CHECK(a.agree);

    ZeroVectorDiagnostic b = vector_is_zero_iff_fixed_point_check(
        SurfaceMap::torus_translation(0.3, 0.0), 200, 16, 1e-3);
    CHECK_FALSE(b.theta_zero);
    CHECK_FALSE(b.fixed_point_found);
    CHECK(b.agree);

    // conjugated translation keeps both sides of the equivalence
    SurfaceMap f = SurfaceMap::conjugate(SurfaceMap::torus_warp_t(0.1),
                                         SurfaceMap::torus_translation(0.27, 0.61));
    ZeroVectorDiagnostic c = vector_is_zero_iff_fixed_point_check(f, 400, 16, 1e-2);
    CHECK_FALSE(c.theta_zero);
    CHECK_FALSE(c.fixed_point_found);
    CHECK(c.agree);
}
