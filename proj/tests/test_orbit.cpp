#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kere/orbit.hpp"
#include "kere/rng.hpp"

using namespace kere;

TEST_CASE("orbit segments") {
    SurfaceMap id = SurfaceMap::identity(Surface::Torus);
    SurfacePoint x = torus_point(0.2, 0.6);
    OrbitSegment seg = orbit(id, x, -3, 3);
    for (int n = -3; n <= 3; ++n) CHECK(surface_distance(seg.at(n), x) == 0.0);

    SurfaceMap tau = SurfaceMap::torus_translation(0.25, 0.0);
    OrbitSegment s2 = orbit(tau, torus_point(0, 0), 0, 4);
    CHECK(surface_distance(s2.at(1), torus_point(0.25, 0)) <= 1e-12);
    CHECK(surface_distance(s2.at(3), torus_point(0.75, 0)) <= 1e-12);
    CHECK(surface_distance(s2.at(4), torus_point(0.0, 0)) <= 1e-12);

    // consecutive points differ by one application of the map
    SurfaceMap H = SurfaceMap::mobius(2, 0, 0, 1);
    OrbitSegment s3 = orbit(H, sphere_from_plane(Complex(1, 0)), -5, 5);
    for (int n = -5; n < 5; ++n)
        CHECK(surface_distance(H.forward(s3.at(n)), s3.at(n + 1)) <= 1e-9);
    for (int n = -5; n <= 5; ++n) {
        Complex z = sphere_to_plane(s3.at(n));
        CHECK(std::abs(z) == doctest::Approx(std::pow(2.0, n)).epsilon(1e-9));
    }
}

TEST_CASE("omega limits of the rigid sphere models") {
    // translation-type map: everything converges to the fixed point at
    // infinity in both directions
    SurfaceMap T = SurfaceMap::mobius(1, 1, 0, 1);
    SurfacePoint start = sphere_from_plane(Complex(0.3, -0.2));
    FiniteSet om = omega_limit(T, start, 200, 400, 0.05);
    REQUIRE(om.size() == 1);
    CHECK(surface_distance(om.points[0], north_pole()) <= 0.05);
    FiniteSet al = alpha_limit(T, start, 200, 400, 0.05);
    REQUIRE(al.size() == 1);
    CHECK(surface_distance(al.points[0], north_pole()) <= 0.05);

    SurfaceMap H = SurfaceMap::mobius(2, 0, 0, 1);
    SurfacePoint one = sphere_from_plane(Complex(1, 0));
    FiniteSet omH = omega_limit(H, one, 60, 120, 0.02);
    REQUIRE(omH.size() == 1);
    CHECK(surface_distance(omH.points[0], north_pole()) <= 0.02);
    FiniteSet alH = alpha_limit(H, one, 60, 120, 0.02);
    REQUIRE(alH.size() == 1);
    CHECK(surface_distance(alH.points[0], south_pole()) <= 0.02);

    SurfaceMap idf = SurfaceMap::identity(Surface::Sphere);
    FiniteSet omI = alpha_limit(idf, one, 5, 20, 0.01);
    REQUIRE(omI.size() == 1);
    CHECK(surface_distance(omI.points[0], one) <= 1e-12);
}

TEST_CASE("omega limit of an irrational translation matches the closure oracle") {
    const double phi = 0.6180339887498949;
    SurfaceMap tau = SurfaceMap::torus_translation(phi, 0.0);
    SurfacePoint x = torus_point(0.2, 0.4);
    const double cluster = 0.02;
    FiniteSet om = omega_limit(tau, x, 100, 4000, cluster);

    FiniteSet closure;  // fine direct sampling of the closed orbit circle
    closure.mesh = 1e-3;
    for (int k = 0; k < 1000; ++k)
        closure.points.push_back(torus_point(0.2 + k / 1000.0, 0.4));
    CHECK(hausdorff_distance(om, closure) <= 2.0 * cluster);
}

TEST_CASE("omega sets are forward invariant at cluster scale") {
    Rng rng(3);
    std::vector<SurfaceMap> maps;
    maps.push_back(SurfaceMap::torus_translation(0.618034, 0.414214));
    maps.push_back(SurfaceMap::mobius(1, 1, 0, 1));
    maps.push_back(SurfaceMap::klein_phi(0.318310));
    maps.push_back(SurfaceMap::mobius(Complex(std::cos(0.7), std::sin(0.7)), 0, 0, 1));
    for (const auto& f : maps) {
        for (int k = 0; k < 3; ++k) {
            SurfacePoint x = random_point(f.surface(), rng);
            double cluster = 0.05;
            FiniteSet om = omega_limit(f, x, 150, 400, cluster);
            for (const auto& p : om.points)
                CHECK(point_set_distance(f.forward(p), om) <= 1.5 * cluster);
        }
    }
}

TEST_CASE("return symmetry for recurrent isometries") {
    // if f^n(x) comes back near x then f^-n stays near as well
    SurfaceMap tau = SurfaceMap::torus_translation(0.618034, 0.0);
    SurfacePoint x = torus_point(0.3, 0.3);
    double eps = 0.05;
    SurfacePoint p = x;
    int hit = -1;
    for (int n = 1; n <= 1000; ++n) {
        p = tau.forward(p);
        if (surface_distance(p, x) < eps) {
            hit = n;
            break;
        }
    }
    REQUIRE(hit > 0);
    CHECK(surface_distance(tau.iterate(x, -hit), x) < 2 * eps);

    // recurrent isometry: forward and backward limits agree
    double cluster = 0.03;
    FiniteSet om = omega_limit(tau, x, 100, 3000, cluster);
    FiniteSet al = alpha_limit(tau, x, 100, 3000, cluster);
    CHECK(hausdorff_distance(om, al) <= 2 * cluster);
}

TEST_CASE("equicontinuity modulus of an isometry stays at full scale") {
    SurfaceMap tau = SurfaceMap::torus_translation(0.37, 0.58);
    EquicontinuityProfile prof =
        equicontinuity_modulus(tau, torus_point(0.1, 0.9), 0.1, 100, 10);
    CHECK(prof.delta_estimate >= 0.9 * prof.eps);
    CHECK_FALSE(prof.collapsed);
    CHECK(prof.delta_estimate <= prof.eps);
}

TEST_CASE("modulus collapses near the singular points and nowhere else") {
    SurfaceMap H = SurfaceMap::mobius(2, 0, 0, 1);
    // the two-sided derivative along the orbit of an equatorial point
    // peaks at n = 0, so the point is regular with a full-scale modulus
    EquicontinuityProfile eq =
        equicontinuity_modulus(H, sphere_from_plane(Complex(1, 0)), 0.1, 30, 8);
    CHECK_FALSE(eq.collapsed);
    CHECK(eq.delta_estimate >= 0.3 * eq.eps);

    // next to a singular point the amplification 1/r kills every probe
    EquicontinuityProfile pole =
        equicontinuity_modulus(H, sphere_from_plane(Complex(1e-4, 0)), 0.1, 30, 8);
    CHECK(pole.collapsed);

    // the profile map drifts every probe below the flagging scale
    SurfaceMap prof_map = SurfaceMap::rotation_profile({{0.0, 0.0}, {1.0, 1.0}});
    EquicontinuityProfile p2 =
        equicontinuity_modulus(prof_map, sphere_from_plane(Complex(0.8, 0.0)), 0.1, 1000, 8);
    CHECK(p2.delta_estimate <= 0.05 * p2.eps);
}

TEST_CASE("modulus estimate is monotone in eps and horizon up to probe granularity") {
    SurfaceMap f = SurfaceMap::conjugate(SurfaceMap::radial_warp(0.15),
                                         SurfaceMap::mobius(Complex(std::cos(0.9),
                                                                    std::sin(0.9)),
                                                            0, 0, 1));
    SurfacePoint x = sphere_from_plane(Complex(0.4, 0.1));
    double prev = 0.0;
    for (double eps : {0.05, 0.1, 0.2, 0.4}) {
        EquicontinuityProfile prof = equicontinuity_modulus(f, x, eps, 60, 8, 11);
        CHECK(prof.delta_estimate >= prev - eps / 1000.0);
        prev = prof.delta_estimate;
    }
    double prev_h = 1e300;
    for (int horizon : {20, 80, 320}) {
        EquicontinuityProfile prof = equicontinuity_modulus(f, x, 0.1, horizon, 8, 11);
        CHECK(prof.delta_estimate <= prev_h + 1e-4);
        prev_h = prof.delta_estimate;
    }
}

TEST_CASE("singular set of the rigid families") {
    // rotation: no flags anywhere
    SurfaceMap R = SurfaceMap::mobius(Complex(std::cos(1.1), std::sin(1.1)), 0, 0, 1);
    SingularSetEstimate none = singular_set(R, 16, 0.1, 120, 0.08, 5);
    CHECK(none.flag_count() == 0);

    // two-sided expansion: flags hug the two fixed points
    SurfaceMap H = SurfaceMap::mobius(2, 0, 0, 1);
    SingularSetEstimate est = singular_set(H, 32, 0.1, 200, 0.08, 6);
    CHECK(est.flag_count() > 0);
    double cell2 = 2.0 * grid_cell_size(Surface::Sphere, 32);
    bool near_n = false, near_s = false;
    for (const auto& p : est.flagged_points()) {
        double dn = surface_distance(p, north_pole());
        double ds = surface_distance(p, south_pole());
        CHECK(std::min(dn, ds) <= cell2);
        near_n = near_n || dn <= cell2;
        near_s = near_s || ds <= cell2;
    }
    CHECK(near_n);
    CHECK(near_s);

    // flagged set is coarsely invariant: images land next to flags
    FiniteSet flags{est.flagged_points(), 0.0};
    for (const auto& p : flags.points)
        CHECK(point_set_distance(H.forward(p), flags) <=
              2.0 * grid_cell_size(Surface::Sphere, 32) + 1e-9);
}

TEST_CASE("profile map floods the singular grid") {
    SurfaceMap f = SurfaceMap::rotation_profile({{0.0, 0.0}, {1.0, 1.0}});
    SingularSetEstimate est = singular_set(f, 24, 0.1, 500, 0.05, 6);
    CHECK(est.flagged_fraction() >= 0.85);
}

TEST_CASE("recurrence of points") {
    SurfaceMap per = SurfaceMap::torus_translation(0.25, 0.5);
    CHECK(is_recurrent_point(per, torus_point(0.1, 0.1), 10, 1e-9));

    // pigeonhole guarantees a circle-rotation return within (1/eps)^2
    // steps, well inside this horizon
    SurfaceMap irr = SurfaceMap::torus_translation(0.6180339887, 0.0);
    CHECK(is_recurrent_point(irr, torus_point(0.2, 0.2), 1000, 0.05));

    SurfaceMap T = SurfaceMap::mobius(1, 1, 0, 1);
    CHECK_FALSE(is_recurrent_point(T, south_pole(), 1000, 0.1));
}

TEST_CASE("recurrence of maps") {
    SurfaceMap rat = SurfaceMap::torus_translation(3.0 / 8.0, 1.0 / 8.0);
    MapRecurrence r = is_recurrent_map(rat, 8, 64, 1e-9);
    CHECK(r.recurrent);
    CHECK(r.n == 8);

    SurfaceMap irr = SurfaceMap::torus_translation(0.6180339887, 0.4142135624);
    MapRecurrence r2 = is_recurrent_map(irr, 8, 10000, 0.05);
    CHECK(r2.recurrent);
    CHECK(surface_distance(irr.iterate(torus_point(0, 0), r2.n), torus_point(0, 0)) < 0.08);

    SurfaceMap H = SurfaceMap::mobius(2, 0, 0, 1);
    MapRecurrence r3 = is_recurrent_map(H, 8, 300, 0.05);
    CHECK_FALSE(r3.recurrent);
}

TEST_CASE("orbit covering numbers match direct enumeration") {
    // periodic: the q orbit points are covered by the first q-1 pushes
    SurfaceMap per = SurfaceMap::torus_translation(0.0, 0.2);
    auto Nper = orbit_covering_check(per, torus_point(0.5, 0.1), 0.05, 10, 40);
    REQUIRE(Nper.has_value());
    CHECK(*Nper == 4);

    const double phi = 0.6180339887498949;
    SurfaceMap rot = SurfaceMap::torus_translation(phi, 0.0);
    SurfacePoint x = torus_point(0.3, 0.7);
    const double r = 0.1;
    const int span = 150, nmax = 20;
    auto got = orbit_covering_check(rot, x, r, nmax, span);
    REQUIRE(got.has_value());
    CHECK(*got <= 13);

    // independent enumeration: p_n is covered by push i iff the rotation
    // distance of (n-i) steps is within the radius
    int oracle = 0;
    for (int n = -span; n <= span; ++n) {
        int found = -1;
        for (int i = 0; i <= nmax && found < 0; ++i) {
            double d = circle_dist(reduce_mod1((n - i) * phi), 0.0);
            if (d <= r) found = i;
        }
        REQUIRE(found >= 0);
        oracle = std::max(oracle, found);
    }
    CHECK(*got == oracle);

    // non-recurrent point: coverage fails
    SurfaceMap H = SurfaceMap::mobius(2, 0, 0, 1);
    auto none = orbit_covering_check(H, sphere_from_plane(Complex(1, 0)), 0.05, 12, 30);
    CHECK_FALSE(none.has_value());
}

TEST_CASE("fixed point census on the model maps") {
    // rotation: the two axis points
    SurfaceMap R = SurfaceMap::mobius(Complex(std::cos(1.3), std::sin(1.3)), 0, 0, 1);
    FixedPointCensus c = fixed_point_census(R, 32);
    CHECK_FALSE(c.curve_detected);
    REQUIRE(c.points.size() == 2);
    for (const auto& p : c.points)
        CHECK(std::min(surface_distance(p, north_pole()), surface_distance(p, south_pole())) <
              0.01);

    // plain reflection fixes a whole great circle
    SurfaceMap refl = SurfaceMap::fractional_reflection(1, 0, 0, 1);
    FixedPointCensus cr = fixed_point_census(refl, 32);
    CHECK(cr.curve_detected);
}

TEST_CASE("singular flags of rigid sphere families form at most two components") {
    for (auto f : {SurfaceMap::mobius(2, 0, 0, 1), SurfaceMap::mobius(1, 1, 0, 1),
                   SurfaceMap::mobius(Complex(std::cos(0.9), std::sin(0.9)), 0, 0, 1)}) {
        SingularSetEstimate est = singular_set(f, 32, 0.1, 200, 0.08, 6);
        auto flagged = est.flagged_points();
        if (flagged.empty()) continue;
        int comps = 0;
        epsilon_components(flagged, 3.0 * grid_cell_size(Surface::Sphere, 32), &comps);
        CHECK(comps <= 2);
    }
}
