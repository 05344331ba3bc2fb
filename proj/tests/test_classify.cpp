#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kere/classify.hpp"
#include "kere/rng.hpp"

using namespace kere;

namespace {

ClassifyBudget fast_budget() {
    ClassifyBudget b;
    b.grid = 32;
    b.horizon = 200;
    b.census_grid = 32;
    b.rot_horizon = 4000;
    return b;
}

SurfaceMap zrotation(double alpha) {
    return SurfaceMap::mobius(Complex(std::cos(2 * M_PI * alpha), std::sin(2 * M_PI * alpha)),
                              0, 0, 1);
}

double angle_sym_dist(double got, double want) {
    return std::min(circle_dist(got, want), circle_dist(got, 1.0 - want));
}

}  // namespace

TEST_CASE("sphere models classify to their classes") {
    ClassifyBudget b = fast_budget();

    ClassificationResult ell = classify(zrotation(0.3618033989), b);
    CHECK(ell.cls == MapClass::Elliptic);
    CHECK(angle_sym_dist(ell.alpha, 0.3618033989) <= 1e-2);

    ClassificationResult par = classify(SurfaceMap::mobius(1, 1, 0, 1), b);
    CHECK(par.cls == MapClass::Parabolic);

    ClassificationResult hyp = classify(SurfaceMap::mobius(2, 0, 0, 1), b);
    CHECK(hyp.cls == MapClass::Hyperbolic);
    CHECK(hyp.evidence.omega_alpha_gap > 1.0);

    ClassificationResult refl = classify(SurfaceMap::fractional_reflection(1, 0, 0, 1), b);
    CHECK(refl.cls == MapClass::Reflection);

    ClassificationResult sp = classify(SurfaceMap::fractional_reflection(1, 1, 0, 1), b);
    CHECK(sp.cls == MapClass::SemiParabolic);

    ClassificationResult sh = classify(SurfaceMap::fractional_reflection(2, 0, 0, 1), b);
    CHECK(sh.cls == MapClass::SemiHyperbolic);

    ClassificationResult se = classify(
        SurfaceMap::fractional_reflection(0, Complex(std::cos(1.9), std::sin(1.9)), 1, 0), b);
    CHECK(se.cls == MapClass::SemiElliptic);

    ClassificationResult nr =
        classify(SurfaceMap::rotation_profile({{0.0, 0.0}, {1.0, 1.0}}), b);
    CHECK(nr.cls == MapClass::NotRegular);

    ClassificationResult idc = classify(SurfaceMap::identity(Surface::Sphere), b);
    CHECK(idc.cls == MapClass::Identity);
}

TEST_CASE("torus models classify to their classes") {
    ClassifyBudget b = fast_budget();

    ClassificationResult tr =
        classify(SurfaceMap::torus_translation(0.6180339887, 0.4142135624), b);
    CHECK(tr.cls == MapClass::TorusTranslation);
    CHECK(circle_dist(tr.rho[0], 0.6180339887) <= 1e-3);
    CHECK(circle_dist(tr.rho[1], 0.4142135624) <= 1e-3);

    ClassificationResult t1 = classify(SurfaceMap::torus_reversing_type1(0.3819660113), b);
    CHECK(t1.cls == MapClass::TorusReversingType1);
    CHECK(angle_sym_dist(t1.alpha, 0.3819660113) <= 1e-3);

    ClassificationResult t2 = classify(SurfaceMap::torus_reversing_type2(0.2718281828), b);
    CHECK(t2.cls == MapClass::TorusReversingType2);
    // the shifted-base freedom makes the angle of the second family a
    // half-period class
    double want = 0.2718281828;
    double got = t2.alpha;
    double best = 1.0;
    for (double cand : {want, want + 0.5, 1.0 - want, 1.5 - want})
        best = std::min(best, circle_dist(got, reduce_mod1(cand)));
    CHECK(best <= 1e-3);

    // quarter turn: homology has order four and the map itself does too
    Mat2i rot4{{{0, -1}, {1, 0}}};
    Mat2i p = rot4;
    int order = 1;
    while (!(p == Mat2i::identity())) {
        p = p * rot4;
        ++order;
    }
    CHECK(order == 4);
    ClassificationResult per = classify(SurfaceMap::torus_linear(rot4), b);
    CHECK(per.cls == MapClass::Periodic);
    CHECK(per.period == 4);
    // direct verification of the detected period on a grid
    SurfaceMap f4 = SurfaceMap::torus_linear(rot4);
    Rng rng(9);
    for (int k = 0; k < 50; ++k) {
        SurfacePoint x = random_point(Surface::Torus, rng);
        CHECK(surface_distance(f4.iterate(x, 4), x) <= 1e-12);
    }

    ClassificationResult rat = classify(SurfaceMap::torus_translation(0.25, 0.5), b);
    CHECK(rat.cls == MapClass::Periodic);
    CHECK(rat.period == 4);

    // infinite-order lattice action cannot be regular
    ClassificationResult an = classify(SurfaceMap::torus_linear(Mat2i{{{2, 1}, {1, 1}}}), b);
    CHECK(an.cls == MapClass::NotRegular);
}

TEST_CASE("klein models classify to their classes") {
    ClassifyBudget b = fast_budget();
    double a1 = 0.3183098862, a2 = 0.3819660113;

    ClassificationResult phi = classify(SurfaceMap::klein_phi(a1), b);
    CHECK(phi.cls == MapClass::KleinPhi);
    CHECK(circle_dist(phi.alpha, a1) <= 1e-3);

    ClassificationResult psi = classify(SurfaceMap::klein_psi(a2), b);
    CHECK(psi.cls == MapClass::KleinPsi);
    CHECK(circle_dist(psi.alpha, a2) <= 1e-3);

    // rational angle gives a finite-order map; the period triples because
    // the vertical shift must return to the lattice
    SurfaceMap phi3 = SurfaceMap::klein_phi(1.0 / 3.0);
    ClassificationResult per = classify(phi3, b);
    CHECK(per.cls == MapClass::Periodic);
    CHECK(per.period == 3);
    Rng rng(11);
    for (int k = 0; k < 30; ++k) {
        SurfacePoint x = random_point(Surface::Klein, rng);
        CHECK(surface_distance(phi3.iterate(x, 3), x) <= 1e-9);
    }
}

TEST_CASE("annulus and strip classify through their doubles") {
    ClassifyBudget b = fast_budget();

    ClassificationResult rot = classify(SurfaceMap::annulus_rotation(0.4142135624), b);
    CHECK(rot.cls == MapClass::AnnulusRotation);
    CHECK(circle_dist(rot.alpha, 0.4142135624) <= 1e-3);

    // the double of the rotation is a vertical torus translation
    ClassificationResult dd =
        classify_torus(SurfaceMap::double_to_torus(SurfaceMap::annulus_rotation(0.4142135624)), b);
    CHECK(dd.cls == MapClass::TorusTranslation);
    CHECK(circle_dist(dd.rho[0], 0.0) <= 1e-9);
    CHECK(circle_dist(dd.rho[1], 0.4142135624) <= 1e-9);

    ClassificationResult rev = classify(SurfaceMap::annulus_reversing(0.3183098862), b);
    CHECK(rev.cls == MapClass::AnnulusReversing);
    CHECK(angle_sym_dist(rev.alpha, 0.3183098862) <= 1e-3);

    ClassificationResult strip = classify(SurfaceMap::mobius_strip_rotation(0.2360679775), b);
    CHECK(strip.cls == MapClass::MobiusStrip);
    CHECK(circle_dist(strip.alpha, 0.2360679775) <= 1e-3);
}

TEST_CASE("classification is invariant under fixed smooth conjugations") {
    ClassifyBudget b = fast_budget();
    SurfaceMap sphere_warp = SurfaceMap::radial_warp(0.1);
    SurfaceMap torus_warp = SurfaceMap::compose(
        {SurfaceMap::torus_warp_s(0.06, 0.7), SurfaceMap::torus_warp_t(0.05, 0.3)});
    SurfaceMap klein_w = SurfaceMap::klein_warp(0.06);
    SurfaceMap annulus_w = SurfaceMap::annulus_warp(0.05);
    SurfaceMap strip_w = SurfaceMap::mobius_strip_lift(SurfaceMap::annulus_warp(0.05));

    struct Item {
        SurfaceMap map;
        SurfaceMap warp;
        MapClass expected;
        double param;
    };
    std::vector<Item> items;
    items.push_back({zrotation(0.3618033989), sphere_warp, MapClass::Elliptic, 0.3618033989});
    items.push_back({SurfaceMap::mobius(1, 1, 0, 1), sphere_warp, MapClass::Parabolic, -1});
    items.push_back({SurfaceMap::mobius(2, 0, 0, 1), sphere_warp, MapClass::Hyperbolic, -1});
    items.push_back({SurfaceMap::fractional_reflection(1, 1, 0, 1), sphere_warp,
                     MapClass::SemiParabolic, -1});
    items.push_back({SurfaceMap::fractional_reflection(2, 0, 0, 1), sphere_warp,
                     MapClass::SemiHyperbolic, -1});
    items.push_back({SurfaceMap::rotation_profile({{0.0, 0.0}, {1.0, 1.0}}), sphere_warp,
                     MapClass::NotRegular, -1});
    items.push_back({SurfaceMap::torus_translation(0.6180339887, 0.4142135624), torus_warp,
                     MapClass::TorusTranslation, -1});
    items.push_back({SurfaceMap::torus_reversing_type1(0.3819660113), torus_warp,
                     MapClass::TorusReversingType1, 0.3819660113});
    items.push_back({SurfaceMap::torus_reversing_type2(0.2718281828), torus_warp,
                     MapClass::TorusReversingType2, -1});
    items.push_back({SurfaceMap::klein_phi(0.3183098862), klein_w, MapClass::KleinPhi,
                     0.3183098862});
    items.push_back({SurfaceMap::klein_psi(0.3819660113), klein_w, MapClass::KleinPsi,
                     0.3819660113});
    items.push_back({SurfaceMap::annulus_rotation(0.4142135624), annulus_w,
                     MapClass::AnnulusRotation, 0.4142135624});
    items.push_back({SurfaceMap::annulus_reversing(0.3183098862), annulus_w,
                     MapClass::AnnulusReversing, 0.3183098862});
    items.push_back({SurfaceMap::mobius_strip_rotation(0.2360679775), strip_w,
                     MapClass::MobiusStrip, 0.2360679775});

    for (const auto& item : items) {
        ClassificationResult plain = classify(item.map, b);
        ClassificationResult warped = classify(SurfaceMap::conjugate(item.warp, item.map), b);
        INFO(to_string(item.expected));
        CHECK(plain.cls == item.expected);
        CHECK(warped.cls == item.expected);
        bool false_not_regular =
            plain.cls == MapClass::NotRegular && item.expected != MapClass::NotRegular;
        CHECK_FALSE(false_not_regular);
        if (item.param >= 0.0) {
            CHECK(angle_sym_dist(plain.alpha, item.param) <= 1e-2);
            CHECK(angle_sym_dist(warped.alpha, item.param) <= 1e-2);
        }
    }
}

TEST_CASE("classified orientation matches the lattice determinant") {
    ClassifyBudget b = fast_budget();
    struct Row {
        SurfaceMap map;
        bool reversing_class;
    };
    std::vector<Row> rows;
    rows.push_back({SurfaceMap::torus_translation(0.6180339887, 0.4142135624), false});
    rows.push_back({SurfaceMap::torus_reversing_type1(0.3819660113), true});
    rows.push_back({SurfaceMap::torus_reversing_type2(0.2718281828), true});
    for (const auto& row : rows) {
        ClassificationResult res = classify(row.map, b);
        REQUIRE(res.evidence.homology.has_value());
        int det = res.evidence.homology->det();
        CHECK((det == -1) == row.reversing_class);
        bool classed_reversing = res.cls == MapClass::TorusReversingType1 ||
                                 res.cls == MapClass::TorusReversingType2;
        CHECK(classed_reversing == row.reversing_class);
    }
}

TEST_CASE("squares of reversing maps are vertical translations") {
    ClassifyBudget b = fast_budget();
    for (double alpha : {0.3819660113, 0.2718281828}) {
        for (int type : {1, 2}) {
            SurfaceMap f = type == 1 ? SurfaceMap::torus_reversing_type1(alpha)
                                     : SurfaceMap::torus_reversing_type2(alpha);
            ClassificationResult sq = classify(SurfaceMap::compose({f, f}), b);
            CHECK(sq.cls == MapClass::TorusTranslation);
            CHECK(circle_dist(sq.rho[0], 0.0) <= 1e-3);
            CHECK(circle_dist(sq.rho[1], reduce_mod1(2 * alpha)) <= 1e-3);
        }
    }
}

TEST_CASE("classification results serialize sane parameter domains") {
    ClassifyBudget b = fast_budget();
    ClassificationResult t1 = classify(SurfaceMap::torus_reversing_type1(0.75), b);
    CHECK(t1.alpha >= 0.0);
    CHECK(t1.alpha < 1.0);
    ClassificationResult per = classify(SurfaceMap::torus_translation(0.5, 0.25), b);
    CHECK(per.cls == MapClass::Periodic);
    CHECK(per.period >= 1);
}
