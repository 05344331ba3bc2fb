// Acceptance suite: runs every contract check at its stated tolerance and
// prints one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "kere/classify.hpp"
#include "kere/conjugacy.hpp"
#include "kere/finite_set.hpp"
#include "kere/report.hpp"
#include "kere/rng.hpp"
#include "oracles.hpp"

using namespace kere;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

SurfaceMap random_rotation_mobius(Rng& rng) {
    // Haar-uniform rotation of the sphere via a unit quaternion
    double q[4];
    double norm = 0.0;
    for (auto& v : q) {
        double u1 = rng.uniform(), u2 = rng.uniform();
        v = std::sqrt(-2.0 * std::log(std::max(u1, 1e-300))) * std::cos(2.0 * M_PI * u2);
        norm += v * v;
    }
    norm = std::sqrt(norm);
    Complex a(q[0] / norm, q[1] / norm), b(q[2] / norm, q[3] / norm);
    return SurfaceMap::mobius(a, b, -std::conj(b), std::conj(a));
}

SurfaceMap zrotation(double alpha) {
    return SurfaceMap::mobius(Complex(std::cos(2 * M_PI * alpha), std::sin(2 * M_PI * alpha)),
                              0, 0, 1);
}

// ---------------------------------------------------------------------- 1
Outcome criterion_mobius_gallery(std::vector<SurfaceMap>* hyperbolic_out,
                                 std::vector<std::pair<SurfacePoint, SurfacePoint>>* fp_out) {
    Rng rng(101);
    ClassifyBudget budget;
    budget.grid = 64;
    budget.horizon = 300;

    int correct = 0, total = 0;
    std::string mistakes;
    auto check = [&](const SurfaceMap& f, MapClass expected, const char* tag) {
        ClassificationResult res = classify(f, budget);
        ++total;
        if (res.cls == expected)
            ++correct;
        else
            mistakes += std::string(" ") + tag + "->" + to_string(res.cls);
    };

    for (int k = 0; k < 10; ++k) check(zrotation(rng.uniform(0.05, 0.95)), MapClass::Elliptic, "E");
    for (int k = 0; k < 10; ++k) {
        SurfaceMap P = random_rotation_mobius(rng);
        check(SurfaceMap::conjugate(P, SurfaceMap::mobius(1, 1, 0, 1)), MapClass::Parabolic, "P");
    }
    for (int k = 0; k < 10; ++k) {
        SurfaceMap P = random_rotation_mobius(rng);
        double lam = rng.uniform(1.5, 4.0);
        SurfaceMap f = SurfaceMap::conjugate(P, SurfaceMap::mobius(lam, 0, 0, 1));
        check(f, MapClass::Hyperbolic, "H");
        if (hyperbolic_out) {
            hyperbolic_out->push_back(f);
            fp_out->push_back({P.forward(south_pole()), P.forward(north_pole())});
        }
    }
    Outcome out;
    out.pass = correct == total;
    out.detail = std::to_string(correct) + "/" + std::to_string(total) + " classes correct" +
                 (mistakes.empty() ? "" : ";" + mistakes);
    return out;
}

// ---------------------------------------------------------------------- 2
Outcome criterion_hyperbolic_clusters(
    std::vector<SurfaceMap> maps,
    std::vector<std::pair<SurfacePoint, SurfacePoint>> fps) {
    Rng rng(202);
    while (maps.size() < 30) {
        SurfaceMap P = random_rotation_mobius(rng);
        double lam = rng.uniform(1.5, 4.0);
        maps.push_back(SurfaceMap::conjugate(P, SurfaceMap::mobius(lam, 0, 0, 1)));
        fps.push_back({P.forward(south_pole()), P.forward(north_pole())});
    }
    const double two_cells = 2.0 * grid_cell_size(Surface::Sphere, 64);
    int good = 0;
    double worst = 0.0;
    for (std::size_t k = 0; k < maps.size(); ++k) {
        SingularSetEstimate est = singular_set(maps[k], 64, 0.1, 300, 0.08, 6, 77 + k);
        bool near_a = false, near_b = false, all_close = true;
        for (const auto& p : est.flagged_points()) {
            double da = surface_distance(p, fps[k].first);
            double db = surface_distance(p, fps[k].second);
            worst = std::max(worst, std::min(da, db));
            if (std::min(da, db) > two_cells) all_close = false;
            near_a = near_a || da <= two_cells;
            near_b = near_b || db <= two_cells;
        }
        if (all_close && near_a && near_b) ++good;
    }
    Outcome out;
    out.pass = good >= 28;
    out.detail = std::to_string(good) + "/30 runs inside two cells (worst offset " +
                 fmt_real(worst) + ")";
    return out;
}

// ---------------------------------------------------------------------- 3
Outcome criterion_profile_floods_grid() {
    SurfaceMap f = SurfaceMap::rotation_profile({{0.0, 0.0}, {1.0, 1.0}});
    SingularSetEstimate est = singular_set(f, 64, 0.1, 500, 0.05, 6, 0);
    Outcome out;
    out.pass = est.flagged_fraction() >= 0.95;
    out.detail = "flagged fraction " + fmt_real(est.flagged_fraction());
    return out;
}

// ---------------------------------------------------------------------- 4
Outcome criterion_rotation_numbers() {
    Rng rng(404);
    double worst1 = 0.0, worst3 = 0.0;
    for (int k = 0; k < 20; ++k) {
        double a = rng.uniform(0.01, 0.99);
        CircleMap c = CircleMap::rotation(a);
        double r1 = rotation_number(c, rng.uniform(), 10000).value;
        worst1 = std::max(worst1, circle_dist(r1, a));
        double r3 = rotation_number(c.power(3), rng.uniform(), 10000).value;
        worst3 = std::max(worst3, circle_dist(r3, reduce_mod1(3.0 * r1)));
    }
    Outcome out;
    out.pass = worst1 <= 1e-3 && worst3 <= 3e-3;
    out.detail = "max |rho-a| " + fmt_real(worst1) + ", max power defect " + fmt_real(worst3);
    return out;
}

// ---------------------------------------------------------------------- 5
Outcome criterion_translation_vectors() {
    Rng rng(505);
    double worst_exact = 0.0;
    for (int k = 0; k < 5; ++k) {
        double a = rng.uniform(), b = rng.uniform();
        TranslationVector tv =
            translation_vector(SurfaceMap::torus_translation(a, b), Vec2{0.2, 0.8}, 1000);
        worst_exact = std::max({worst_exact, std::fabs(tv.value[0] - a),
                                std::fabs(tv.value[1] - b)});
    }

    // spread bound on a warped translation, ten base points
    SurfaceMap W = SurfaceMap::compose(
        {SurfaceMap::torus_warp_s(0.08, 0.7), SurfaceMap::torus_warp_t(0.06, 0.3)});
    SurfaceMap g = SurfaceMap::conjugate(
        W, SurfaceMap::torus_translation(0.6180339887, 0.4142135624));
    const long horizon = 1000;
    TranslationVector tw = translation_vector(g, Vec2{0.1, 0.3}, horizon);
    double M = lift_displacement_bound(g);
    bool spread_ok = tw.spread <= 4.0 * M / double(horizon);

    double worst_add = 0.0;
    for (int k = 0; k < 20; ++k) {
        SurfaceMap ga = SurfaceMap::torus_translation(rng.uniform(), rng.uniform());
        SurfaceMap gb = SurfaceMap::torus_translation(rng.uniform(), rng.uniform());
        TranslationVector ta = translation_vector(ga, Vec2{0, 0}, 400);
        TranslationVector tb = translation_vector(gb, Vec2{0, 0}, 400);
        TranslationVector tab =
            translation_vector(SurfaceMap::compose({ga, gb}), Vec2{0, 0}, 400);
        double allowed = ta.spread + tb.spread + tab.spread + 1e-12;
        worst_add = std::max(
            {worst_add,
             circle_dist(reduce_mod1(tab.value[0]), reduce_mod1(ta.value[0] + tb.value[0])) -
                 allowed,
             circle_dist(reduce_mod1(tab.value[1]), reduce_mod1(ta.value[1] + tb.value[1])) -
                 allowed});
    }

    Outcome out;
    out.pass = worst_exact <= 1e-9 && spread_ok && worst_add <= 0.0;
    out.detail = "exact err " + fmt_real(worst_exact) + ", spread " + fmt_real(tw.spread) +
                 " (bound " + fmt_real(4.0 * M / double(horizon)) + "), additivity excess " +
                 fmt_real(std::max(0.0, worst_add));
    return out;
}

// ---------------------------------------------------------------------- 6
Outcome criterion_hausdorff_oracle() {
    Rng rng(606);
    int equal = 0;
    for (int k = 0; k < 100; ++k) {
        FiniteSet A, B;
        int na = 5 + rng.uniform_int(196), nb = 5 + rng.uniform_int(196);
        for (int i = 0; i < na; ++i)
            A.points.push_back(torus_point(rng.uniform(), rng.uniform()));
        for (int i = 0; i < nb; ++i)
            B.points.push_back(torus_point(rng.uniform(), rng.uniform()));
        if (hausdorff_distance(A, B) == oracles::hausdorff_bruteforce(A, B)) ++equal;
    }
    Outcome out;
    out.pass = equal == 100;
    out.detail = std::to_string(equal) + "/100 pairs bit-identical to the double loop";
    return out;
}

// ---------------------------------------------------------------------- 7
Outcome criterion_elliptic_conjugacy() {
    SurfaceMap f = SurfaceMap::conjugate(SurfaceMap::radial_warp(0.1), zrotation(0.3618033989));
    ConjugacyBudget budget;  // 64 x 64 polar grid
    ConjugacyMap h = elliptic_conjugacy(f, budget);
    Outcome out;
    out.pass = h.residual <= 0.05;
    out.detail = "residual " + fmt_real(h.residual) + " on 64x64";
    return out;
}

// ---------------------------------------------------------------------- 8
Outcome criterion_torus_conjugacy() {
    SurfaceMap W = SurfaceMap::compose(
        {SurfaceMap::torus_warp_s(0.08, 0.7), SurfaceMap::torus_warp_t(0.06, 0.3)});
    SurfaceMap f = SurfaceMap::conjugate(
        W, SurfaceMap::torus_translation(0.41421356237309515, 0.7320508075688772));
    ConjugacyBudget budget;
    ConjugacyMap h = torus_translation_conjugacy(f, budget);
    Outcome out;
    out.pass = h.residual <= 0.05;
    out.detail = "residual " + fmt_real(h.residual) + " on 64x64";
    return out;
}

// ---------------------------------------------------------------------- 9
Outcome criterion_reversing_normalization() {
    const double alpha = 0.3618033989;
    SurfaceMap f = SurfaceMap::conjugate(SurfaceMap::torus_warp_t(-0.1),
                                         SurfaceMap::torus_reversing_type1(alpha));
    ConjugacyMap B = reversing_normalization(f, 1, 1024);

    auto beta_at = [&](double s) {
        s = reduce_mod1(s);
        double fs = s * 1024;
        int lo = std::min(static_cast<int>(std::floor(fs)), 1023);
        double fr = fs - lo;
        double d = B.beta[lo + 1] - B.beta[lo];
        d -= std::round(d);
        return B.beta[lo] + fr * d;
    };
    double identity_err = 0.0;
    for (int k = 0; k < 1024; ++k) {
        double s = k / 1024.0;
        double ashift = reduce_mod1(f.forward(torus_point(s, 0.37)).t() - 0.37);
        double lhs = reduce_mod1(ashift + beta_at(s) - beta_at(-s));
        identity_err = std::max(identity_err, circle_dist(lhs, B.model_param[0]));
    }
    Outcome out;
    out.pass = B.residual <= 1e-3 && identity_err <= 1e-6 &&
               circle_dist(B.model_param[0], alpha) <= 1e-4;
    out.detail = "model residual " + fmt_real(B.residual) + ", identity defect " +
                 fmt_real(identity_err);
    return out;
}

// --------------------------------------------------------------------- 10
Outcome criterion_klein_dichotomy() {
    Rng rng(1010);
    ClassifyBudget budget;
    int correct = 0;
    for (int k = 0; k < 10; ++k) {
        double a = rng.uniform(0.03, 0.97);
        if (classify(SurfaceMap::klein_phi(a), budget).cls == MapClass::KleinPhi) ++correct;
        if (classify(SurfaceMap::klein_psi(a), budget).cls == MapClass::KleinPsi) ++correct;
    }
    double worst = 0.0;
    double a = 0.3183098861;
    SurfaceMap psi = SurfaceMap::klein_psi(a);
    SurfaceMap phi2 = SurfaceMap::klein_phi(2 * a);
    for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 64; ++j) {
            SurfacePoint p = klein_point(0.5 * (i + 0.5) / 64.0, (j + 0.5) / 64.0);
            worst = std::max(worst,
                             surface_distance(psi.forward(psi.forward(p)), phi2.forward(p)));
        }
    Outcome out;
    out.pass = correct == 20 && worst <= 1e-9;
    out.detail = std::to_string(correct) + "/20 classified, square defect " + fmt_real(worst);
    return out;
}

// --------------------------------------------------------------------- 11
Outcome criterion_set_limit_laws() {
    Rng rng(1111);
    const double eta = 0.05;
    const int tail = 5, recur_min = 3;
    int inclusion_ok = 0, equivalence_ok = 0, total = 0;

    auto run_instance = [&](const SetSequence& seq, bool expect_stationary) {
        ++total;
        auto lo = liminf_sets(seq, tail, eta);
        FiniteSet hi = limsup_sets(seq, tail, recur_min, eta);
        bool incl = true;
        if (lo) {
            for (const auto& p : lo->points)
                if (point_set_distance(p, hi) > eta) incl = false;
        }
        if (incl) ++inclusion_ok;

        // window stationarity in the Hausdorff metric
        bool stationary = true;
        const auto& last = seq.items.back();
        for (std::size_t k = seq.items.size() - tail; k < seq.items.size(); ++k)
            if (hausdorff_distance(seq.items[k], last) > eta) stationary = false;
        bool limits_agree = lo.has_value() && hausdorff_distance(*lo, hi) <= eta;
        if (stationary == limits_agree && stationary == expect_stationary) ++equivalence_ok;
    };

    for (int t = 0; t < 20; ++t) {  // convergent drifts
        FiniteSet base;
        int n = 3 + rng.uniform_int(6);
        for (int i = 0; i < n; ++i)
            base.points.push_back(torus_point(rng.uniform(), rng.uniform()));
        SetSequence seq;
        for (int k = 1; k <= 10; ++k) {
            FiniteSet item = base;
            for (auto& p : item.points)
                p = torus_point(p.s() + 0.2 / (k * k + 4), p.t() - 0.1 / (k * k + 4));
            seq.items.push_back(item);
        }
        run_instance(seq, true);
    }
    for (int t = 0; t < 15; ++t) {  // alternating far-apart pairs
        FiniteSet P{{torus_point(rng.uniform(0.0, 0.2), rng.uniform(0.0, 0.2))}, 0.0};
        FiniteSet Q{{torus_point(rng.uniform(0.5, 0.7), rng.uniform(0.5, 0.7))}, 0.0};
        SetSequence seq;
        for (int k = 0; k < 10; ++k) seq.items.push_back(k % 2 ? Q : P);
        run_instance(seq, false);
    }
    for (int t = 0; t < 15; ++t) {  // constants
        FiniteSet base;
        int n = 2 + rng.uniform_int(8);
        for (int i = 0; i < n; ++i)
            base.points.push_back(torus_point(rng.uniform(), rng.uniform()));
        SetSequence seq;
        for (int k = 0; k < 10; ++k) seq.items.push_back(base);
        run_instance(seq, true);
    }

    Outcome out;
    out.pass = inclusion_ok == total && equivalence_ok == total;
    out.detail = "inclusion " + std::to_string(inclusion_ok) + "/" + std::to_string(total) +
                 ", stationarity equivalence " + std::to_string(equivalence_ok) + "/" +
                 std::to_string(total);
    return out;
}

// --------------------------------------------------------------------- 12
Outcome criterion_gallery_determinism() {
    fs::path dir1 = fs::temp_directory_path() / "kere_acc_gal1";
    fs::path dir2 = fs::temp_directory_path() / "kere_acc_gal2";
    fs::remove_all(dir1);
    fs::remove_all(dir2);
    std::string flags = " --command gallery --grid 32 --horizon 200 --seed 7 --format json,csv "
                        "> /dev/null 2>&1";
    int r1 = std::system((std::string(KERE_BIN) + flags + " --out " + dir1.string()).c_str());
    int r2 = std::system((std::string(KERE_BIN) + flags + " --out " + dir2.string()).c_str());
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    std::string j1 = slurp(dir1 / "gallery.json"), j2 = slurp(dir2 / "gallery.json");
    std::string c1 = slurp(dir1 / "gallery.csv"), c2 = slurp(dir2 / "gallery.csv");
    Outcome out;
    out.pass = WEXITSTATUS(r1) == 0 && WEXITSTATUS(r2) == 0 && !j1.empty() && j1 == j2 &&
               c1 == c2;
    out.detail = "json " + std::to_string(j1.size()) + " bytes, runs " +
                 (j1 == j2 ? "identical" : "DIFFER");
    return out;
}

}  // namespace

int main() {
    struct Entry {
        int id;
        const char* label;
        Outcome (*fn)();
    };

    std::vector<SurfaceMap> hyp_maps;
    std::vector<std::pair<SurfacePoint, SurfacePoint>> hyp_fps;

    int failures = 0;
    auto report = [&](int id, const char* label, const Outcome& out, double secs) {
        std::printf("%s criterion %2d: %-34s %s (%.1fs)\n", out.pass ? "PASS" : "FAIL", id,
                    label, out.detail.c_str(), secs);
        std::fflush(stdout);
        if (!out.pass) ++failures;
    };
    auto timed = [&](auto&& fn) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome out = fn();
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return std::make_pair(out, secs);
    };

    {
        auto [out, secs] = timed([&] { return criterion_mobius_gallery(&hyp_maps, &hyp_fps); });
        report(1, "Mobius gallery classification", out, secs);
    }
    {
        auto [out, secs] =
            timed([&] { return criterion_hyperbolic_clusters(hyp_maps, hyp_fps); });
        report(2, "hyperbolic singular clusters", out, secs);
    }
    {
        auto [out, secs] = timed([] { return criterion_profile_floods_grid(); });
        report(3, "profile map floods the grid", out, secs);
    }
    {
        auto [out, secs] = timed([] { return criterion_rotation_numbers(); });
        report(4, "rotation numbers", out, secs);
    }
    {
        auto [out, secs] = timed([] { return criterion_translation_vectors(); });
        report(5, "translation vectors", out, secs);
    }
    {
        auto [out, secs] = timed([] { return criterion_hausdorff_oracle(); });
        report(6, "Hausdorff oracle equivalence", out, secs);
    }
    {
        auto [out, secs] = timed([] { return criterion_elliptic_conjugacy(); });
        report(7, "elliptic conjugacy residual", out, secs);
    }
    {
        auto [out, secs] = timed([] { return criterion_torus_conjugacy(); });
        report(8, "torus conjugacy residual", out, secs);
    }
    {
        auto [out, secs] = timed([] { return criterion_reversing_normalization(); });
        report(9, "reversing normalization", out, secs);
    }
    {
        auto [out, secs] = timed([] { return criterion_klein_dichotomy(); });
        report(10, "Klein dichotomy", out, secs);
    }
    {
        auto [out, secs] = timed([] { return criterion_set_limit_laws(); });
        report(11, "set limit laws", out, secs);
    }
    {
        auto [out, secs] = timed([] { return criterion_gallery_determinism(); });
        report(12, "gallery determinism", out, secs);
    }

    if (failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
}
