#include "kere/classify.hpp"

#include <cmath>

#include "kere/conjugacy.hpp"
#include "kere/finite_set.hpp"
#include "kere/rng.hpp"
#include "kere/rotation.hpp"

namespace kere {

std::string to_string(MapClass c) {
    switch (c) {
        case MapClass::Identity: return "Identity";
        case MapClass::Periodic: return "Periodic";
        case MapClass::Elliptic: return "Elliptic";
        case MapClass::Parabolic: return "Parabolic";
        case MapClass::Hyperbolic: return "Hyperbolic";
        case MapClass::Reflection: return "Reflection";
        case MapClass::SemiHyperbolic: return "SemiHyperbolic";
        case MapClass::SemiParabolic: return "SemiParabolic";
        case MapClass::SemiElliptic: return "SemiElliptic";
        case MapClass::TorusTranslation: return "TorusTranslation";
        case MapClass::TorusReversingType1: return "TorusReversingType1";
        case MapClass::TorusReversingType2: return "TorusReversingType2";
        case MapClass::KleinPhi: return "KleinPhi";
        case MapClass::KleinPsi: return "KleinPsi";
        case MapClass::AnnulusRotation: return "AnnulusRotation";
        case MapClass::AnnulusReversing: return "AnnulusReversing";
        case MapClass::MobiusStrip: return "MobiusStrip";
        case MapClass::NotRegular: return "NotRegular";
        case MapClass::Undetermined: return "Undetermined";
    }
    return "?";
}

namespace {

bool near_identity(const SurfaceMap& f, double tol = 1e-9) {
    auto grid = surface_grid(f.surface(), 8);
    for (const auto& p : grid)
        if (surface_distance(f.forward(p), p) > tol) return false;
    return true;
}

int majority_orientation(const SurfaceMap& f, std::uint64_t seed) {
    Rng rng(seed ^ 0x6f7269656eULL);
    int sum = 0;
    for (int i = 0; i < 7; ++i) {
        SurfacePoint x = random_point(f.surface(), rng);
        if (f.surface() == Surface::Annulus || f.surface() == Surface::MobiusStrip)
            if (std::fabs(x.s()) > 0.85) continue;
        sum += jacobian_sign(f, x);
    }
    return sum >= 0 ? 1 : -1;
}

struct SingularSummary {
    int clusters = 0;
    int zones = 0;
    double fraction = 0.0;
    double max_cluster_diameter = 0.0;
    std::vector<SurfacePoint> zone_centroids;
};

SurfacePoint centroid_of(const std::vector<SurfacePoint>& pts) {
    if (pts.front().surface == Surface::Sphere) {
        double x = 0, y = 0, z = 0;
        for (const auto& p : pts) {
            x += p.x();
            y += p.y();
            z += p.z();
        }
        return sphere_point(x, y, z);
    }
    // chart centroid relative to the first point, deck-consistent
    Vec2 acc{0.0, 0.0};
    for (const auto& p : pts) {
        Vec2 d = chart_delta(pts.front(), p);
        acc[0] += d[0];
        acc[1] += d[1];
    }
    return chart_shift(pts.front(), Vec2{acc[0] / pts.size(), acc[1] / pts.size()});
}

SingularSummary summarize_singular(const SingularSetEstimate& est, Surface surf,
                                   double cluster_cells) {
    SingularSummary sum;
    sum.fraction = est.flagged_fraction();
    auto flagged = est.flagged_points();
    if (flagged.empty()) return sum;

    double cell = grid_cell_size(surf, est.grid_resolution);
    int cl_count = 0;
    std::vector<int> comp = epsilon_components(flagged, cluster_cells * cell, &cl_count);
    sum.clusters = cl_count;

    std::vector<SurfacePoint> centroids;
    for (int c = 0; c < cl_count; ++c) {
        std::vector<SurfacePoint> members;
        for (std::size_t i = 0; i < flagged.size(); ++i)
            if (comp[i] == c) members.push_back(flagged[i]);
        double diam = 0.0;
        for (std::size_t i = 0; i < members.size(); ++i)
            for (std::size_t j = i + 1; j < members.size(); ++j)
                diam = std::max(diam, surface_distance(members[i], members[j]));
        sum.max_cluster_diameter = std::max(sum.max_cluster_diameter, diam);
        centroids.push_back(centroid_of(members));
    }

    // fragments of one estimation halo merge into zones
    int zone_count = 0;
    std::vector<int> zcomp = epsilon_components(centroids, 0.5, &zone_count);
    sum.zones = zone_count;
    for (int z = 0; z < zone_count; ++z) {
        std::vector<SurfacePoint> members;
        for (std::size_t i = 0; i < centroids.size(); ++i)
            if (zcomp[i] == z) members.push_back(centroids[i]);
        sum.zone_centroids.push_back(centroid_of(members));
    }
    return sum;
}

std::optional<std::pair<int, double>> find_period(const SurfaceMap& f, int max_period,
                                                  double tol) {
    // random probes rather than a lattice grid: integer-linear maps permute
    // rational lattices periodically and would fake a period
    Rng rng(0x70657269ULL);
    std::vector<SurfacePoint> probes;
    for (int i = 0; i < 144; ++i) probes.push_back(random_point(f.surface(), rng));
    std::vector<SurfacePoint> cur = probes;
    for (int m = 1; m <= max_period; ++m) {
        double sup = 0.0;
        for (std::size_t i = 0; i < probes.size(); ++i) {
            cur[i] = f.forward(cur[i]);
            sup = std::max(sup, surface_distance(cur[i], probes[i]));
        }
        if (sup < tol) return std::make_pair(m, sup);
    }
    return std::nullopt;
}

double elliptic_angle_from_circle(const SurfaceMap& f, const SurfacePoint& fixed,
                                  long rot_horizon, std::string* note) {
    try {
        ConjugacyBudget cb;
        cb.circle_samples = 192;
        cb.max_union_rounds = 300;
        Curve gamma = invariant_circle(f, fixed, 0.5, cb);
        CircleMap c = circle_map_on_curve(f, gamma);
        return rotation_number(c, 0.0, rot_horizon).value;
    } catch (const Error& e) {
        if (note) *note = std::string("invariant circle route failed: ") + e.what();
    }
    // fallback: order the limit ring of a far point by the chart angle
    // around the fixed point and restrict to it
    try {
        SurfacePoint probe = chart_shift(fixed, Vec2{0.8, 0.0});
        FiniteSet ring = omega_limit(f, probe, 200, 4000, 0.02);
        if (ring.size() < 16) return 0.0;
        auto [e1, e2] = sphere_tangent_frame(fixed);
        std::vector<std::pair<double, SurfacePoint>> ordered;
        for (const auto& p : ring.points) {
            double u = (p.x() - fixed.x()) * e1[0] + (p.y() - fixed.y()) * e1[1] +
                       (p.z() - fixed.z()) * e1[2];
            double v = (p.x() - fixed.x()) * e2[0] + (p.y() - fixed.y()) * e2[1] +
                       (p.z() - fixed.z()) * e2[2];
            ordered.push_back({std::atan2(v, u), p});
        }
        std::sort(ordered.begin(), ordered.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        Curve gamma;
        gamma.closed = true;
        for (auto& [ang, p] : ordered) gamma.samples.push_back(p);
        for (std::size_t k = 0; k < gamma.samples.size(); ++k)
            gamma.mesh = std::max(
                gamma.mesh, surface_distance(gamma.samples[k],
                                             gamma.samples[(k + 1) % gamma.samples.size()]));
        CircleMap c = circle_map_on_curve(f, gamma);
        return rotation_number(c, 0.0, rot_horizon).value;
    } catch (const Error& e) {
        if (note) *note = *note + "; omega ring route failed: " + e.what();
        return 0.0;
    }
}

}  // namespace

ClassificationResult classify_sphere(const SurfaceMap& f, const ClassifyBudget& budget) {
    if (f.surface() != Surface::Sphere) throw Error("classify_sphere: wrong surface");
    ClassificationResult res;
    res.surface = Surface::Sphere;

    if (near_identity(f)) {
        res.cls = MapClass::Identity;
        return res;
    }

    const bool preserving = majority_orientation(f, budget.seed) > 0;
    SingularSetEstimate est = singular_set(f, budget.grid, budget.eps, budget.horizon,
                                           budget.threshold, budget.samples, budget.seed);
    SingularSummary sum = summarize_singular(est, Surface::Sphere, budget.cluster_cells);
    res.evidence.singular_clusters = sum.clusters;
    res.evidence.singular_zones = sum.zones;
    res.evidence.flagged_fraction = sum.fraction;
    res.evidence.max_cluster_diameter = sum.max_cluster_diameter;
    res.evidence.singular_points = sum.zone_centroids;

    if (sum.fraction >= 0.25 || sum.max_cluster_diameter >= 2.0) {
        res.cls = MapClass::NotRegular;
        return res;
    }

    const double cell = grid_cell_size(Surface::Sphere, budget.grid);

    if (!preserving) {
        FixedPointCensus census = fixed_point_census(f, budget.census_grid);
        res.evidence.fixed_point_count = static_cast<int>(census.points.size());
        res.evidence.fixed_curve = census.curve_detected;
        if (census.curve_detected) {
            res.cls = MapClass::Reflection;
        } else if (census.points.size() == 2) {
            res.cls = MapClass::SemiHyperbolic;
        } else if (census.points.size() == 1) {
            res.cls = MapClass::SemiParabolic;
        } else if (census.points.empty()) {
            res.cls = MapClass::SemiElliptic;
            // rotation angle of the square on its invariant ring
            SurfaceMap f2 = SurfaceMap::compose({f, f});
            FixedPointCensus c2 = fixed_point_census(f2, budget.census_grid);
            if (c2.points.size() == 2) {
                std::string note;
                double two_theta =
                    elliptic_angle_from_circle(f2, c2.points[0], budget.rot_horizon, &note);
                res.alpha = 0.5 * two_theta;
                if (!note.empty()) res.evidence.notes.push_back(note);
            } else {
                res.evidence.notes.push_back("square has no clean fixed pair");
            }
        } else {
            res.cls = MapClass::Undetermined;
            res.evidence.notes.push_back("unexpected fixed point census");
        }
        return res;
    }

    if (sum.zones == 0) {
        res.cls = MapClass::Elliptic;
        FixedPointCensus census = fixed_point_census(f, budget.census_grid);
        res.evidence.fixed_point_count = static_cast<int>(census.points.size());
        if (!census.points.empty()) {
            std::string note;
            res.alpha =
                elliptic_angle_from_circle(f, census.points[0], budget.rot_horizon, &note);
            if (!note.empty()) res.evidence.notes.push_back(note);
        } else {
            res.evidence.notes.push_back("no fixed point certified; angle not estimated");
        }
        return res;
    }

    if (sum.zones > 2) {
        res.cls = MapClass::Undetermined;
        res.evidence.notes.push_back("more than two singular zones below the size gate");
        return res;
    }

    // one or two zones: the forward and backward limits decide between the
    // one-point and two-point singular models
    Rng rng(budget.seed ^ 0x73616d70ULL);
    std::vector<SurfacePoint> omegas, alphas;
    int fat = 0;
    for (int k = 0; k < 4; ++k) {
        SurfacePoint x = random_point(Surface::Sphere, rng);
        FiniteSet om = omega_limit(f, x, budget.horizon / 2, budget.horizon, 2.0 * cell);
        FiniteSet al = alpha_limit(f, x, budget.horizon / 2, budget.horizon, 2.0 * cell);
        double om_diam = om.size() > 1 ? hausdorff_distance(om, FiniteSet{{om.points[0]}, 0})
                                       : 0.0;
        double al_diam = al.size() > 1 ? hausdorff_distance(al, FiniteSet{{al.points[0]}, 0})
                                       : 0.0;
        if (om_diam > 6.0 * cell || al_diam > 6.0 * cell) {
            ++fat;
            continue;
        }
        omegas.push_back(om.points[0]);
        alphas.push_back(al.points[0]);
    }
    if (fat >= 2 || omegas.size() < 2) {
        res.cls = MapClass::Undetermined;
        res.evidence.notes.push_back("limit sets not point-like despite singular zones");
        return res;
    }
    for (std::size_t i = 1; i < omegas.size(); ++i) {
        if (surface_distance(omegas[i], omegas[0]) > 4.0 * cell ||
            surface_distance(alphas[i], alphas[0]) > 4.0 * cell) {
            res.cls = MapClass::Undetermined;
            res.evidence.notes.push_back("limit points disagree across base points");
            return res;
        }
    }
    SurfacePoint omega_pt = centroid_of(omegas);
    SurfacePoint alpha_pt = centroid_of(alphas);
    double gap = surface_distance(omega_pt, alpha_pt);
    res.evidence.omega_alpha_gap = gap;
    res.confidence.decision_margin = std::fabs(gap - 6.0 * cell);
    if (gap <= 6.0 * cell) {
        res.cls = MapClass::Parabolic;
        if (sum.zones == 2)
            res.evidence.notes.push_back("two flag fragments, but forward and backward "
                                         "limits coincide");
    } else {
        res.cls = MapClass::Hyperbolic;
        if (sum.zones == 1)
            res.evidence.notes.push_back("single flag zone, but forward and backward "
                                         "limits split");
        res.evidence.singular_points = {omega_pt, alpha_pt};
    }
    return res;
}

namespace {

std::optional<std::pair<Mat2i, int>> conjugate_to_reversing_normal_form(const Mat2i& A) {
    const Mat2i t1{{{-1, 0}, {0, 1}}};
    const Mat2i t2{{{-1, 0}, {1, 1}}};
    for (int a = -3; a <= 3; ++a)
        for (int b = -3; b <= 3; ++b)
            for (int c = -3; c <= 3; ++c)
                for (int d = -3; d <= 3; ++d) {
                    Mat2i P{{{a, b}, {c, d}}};
                    int det = P.det();
                    if (det != 1 && det != -1) continue;
                    Mat2i conj = P * A * P.inverse();
                    if (conj == t1) return std::make_pair(P, 1);
                    if (conj == t2) return std::make_pair(P, 2);
                }
    return std::nullopt;
}

bool finite_order(const Mat2i& A, int* order = nullptr) {
    Mat2i p = A;
    for (int k = 1; k <= 6; ++k) {
        if (p == Mat2i::identity()) {
            if (order) *order = k;
            return true;
        }
        p = p * A;
    }
    return false;
}

}  // namespace

ClassificationResult classify_torus(const SurfaceMap& f, const ClassifyBudget& budget) {
    if (f.surface() != Surface::Torus) throw Error("classify_torus: wrong surface");
    ClassificationResult res;
    res.surface = Surface::Torus;

    if (near_identity(f)) {
        res.cls = MapClass::Identity;
        return res;
    }
    if (!f.has_lift()) {
        res.cls = MapClass::Undetermined;
        res.evidence.notes.push_back("map exposes no lift; lattice action unknown");
        return res;
    }
    Mat2i A = homology_matrix_of(f);
    res.evidence.homology = A;

    if (auto per = find_period(f, budget.periodic_max, budget.periodic_tol)) {
        res.cls = MapClass::Periodic;
        res.period = per->first;
        res.confidence.periodic_residual = per->second;
        return res;
    }

    if (A == Mat2i::identity()) {
        Vec2 rho = rotation_vector(f, budget.rot_horizon);
        res.rho = rho;
        res.evidence.rotation_data = rho;
        res.cls = MapClass::TorusTranslation;
        return res;
    }

    if (A.det() == -1) {
        if (!(A * A == Mat2i::identity())) {
            res.cls = MapClass::NotRegular;
            res.evidence.notes.push_back("reversing lattice action of infinite order");
            return res;
        }
        auto norm = conjugate_to_reversing_normal_form(A);
        if (!norm) {
            res.cls = MapClass::Undetermined;
            res.evidence.notes.push_back("no small conjugator to a reversing normal form");
            return res;
        }
        auto [P, type] = *norm;
        SurfaceMap f2 = SurfaceMap::compose({f, f});
        TranslationVector tv = translation_vector(f2, Vec2{0.23, 0.71}, budget.rot_horizon);
        Vec2 theta_nf = P.apply(tv.value);  // eigen-direction of the normal form
        res.evidence.rotation_data = theta_nf;
        if (std::fabs(theta_nf[0]) > 0.02)
            res.evidence.notes.push_back("squared translation vector has an s component");
        res.alpha = reduce_mod1(0.5 * theta_nf[1]);
        res.cls = type == 1 ? MapClass::TorusReversingType1 : MapClass::TorusReversingType2;
        return res;
    }

    // orientation preserving with a nontrivial lattice action
    int order = 0;
    if (finite_order(A, &order)) {
        res.cls = MapClass::Undetermined;
        res.evidence.notes.push_back("finite-order lattice action but no periodic return "
                                     "within budget");
    } else {
        res.cls = MapClass::NotRegular;
        res.evidence.notes.push_back("lattice action of infinite order");
    }
    return res;
}

namespace {

SurfaceMap klein_torus_lift(const SurfaceMap& f) {
    switch (f.kind()) {
        case MapKind::KleinLift:
            return f.chain()[0];
        case MapKind::Inverted:
            return klein_torus_lift(f.chain()[0]).inverted();
        case MapKind::Composite: {
            std::vector<SurfaceMap> ch;
            for (const auto& g : f.chain()) ch.push_back(klein_torus_lift(g));
            return SurfaceMap::compose(std::move(ch));
        }
        case MapKind::Identity:
            return SurfaceMap::identity(Surface::Torus);
        default:
            throw NoLift("klein map without a torus lift");
    }
}

}  // namespace

SurfaceMap klein_oriented_lift(const SurfaceMap& f) {
    if (f.surface() != Surface::Klein) throw Error("klein_oriented_lift: wrong surface");
    SurfaceMap lift = klein_torus_lift(f);
    if (lift.orientation() == Orientation::Preserving) return lift;
    return SurfaceMap::compose({lift, SurfaceMap::torus_reversing_type1(0.5)});
}

ClassificationResult classify_klein(const SurfaceMap& f, const ClassifyBudget& budget) {
    if (f.surface() != Surface::Klein) throw Error("classify_klein: wrong surface");
    ClassificationResult res;
    res.surface = Surface::Klein;

    if (near_identity(f)) {
        res.cls = MapClass::Identity;
        return res;
    }
    if (auto per = find_period(f, budget.periodic_max, budget.periodic_tol)) {
        res.cls = MapClass::Periodic;
        res.period = per->first;
        res.confidence.periodic_residual = per->second;
        return res;
    }

    SurfaceMap f_plus = klein_oriented_lift(f);
    Mat2i A = homology_matrix_of(f_plus);
    res.evidence.homology = A;
    if (!(A == Mat2i::identity())) {
        res.cls = MapClass::NotRegular;
        res.evidence.notes.push_back("oriented lift acts nontrivially on the lattice");
        return res;
    }
    Vec2 rho = rotation_vector(f_plus, budget.rot_horizon);
    res.evidence.rotation_data = rho;
    double ds0 = circle_dist(rho[0], 0.0);
    double ds_half = circle_dist(rho[0], 0.5);
    res.confidence.decision_margin = std::fabs(ds0 - ds_half);
    if (ds0 < 0.01) {
        res.cls = MapClass::KleinPhi;
        res.alpha = rho[1];
    } else if (ds_half < 0.01) {
        res.cls = MapClass::KleinPsi;
        res.alpha = rho[1];
    } else {
        res.cls = MapClass::Undetermined;
        res.evidence.notes.push_back("oriented lift shifts s by neither 0 nor 1/2");
    }
    res.rho = rho;
    return res;
}

ClassificationResult classify_annulus(const SurfaceMap& f, const ClassifyBudget& budget) {
    if (f.surface() != Surface::Annulus) throw Error("classify_annulus: wrong surface");
    ClassificationResult res;
    res.surface = Surface::Annulus;
    if (near_identity(f)) {
        res.cls = MapClass::Identity;
        return res;
    }
    SurfaceMap doubled = SurfaceMap::double_to_torus(f);
    ClassificationResult inner = classify_torus(doubled, budget);
    res.evidence = inner.evidence;
    res.confidence = inner.confidence;
    switch (inner.cls) {
        case MapClass::Periodic:
            res.cls = MapClass::Periodic;
            res.period = inner.period;
            break;
        case MapClass::TorusTranslation:
            if (circle_dist(inner.rho[0], 0.0) < 0.01) {
                res.cls = MapClass::AnnulusRotation;
                res.alpha = inner.rho[1];
            } else {
                res.cls = MapClass::Undetermined;
                res.evidence.notes.push_back("double translates across the gluing circles");
            }
            break;
        case MapClass::TorusReversingType1:
            res.cls = MapClass::AnnulusReversing;
            res.alpha = inner.alpha;
            break;
        default:
            res.cls = inner.cls;
            break;
    }
    return res;
}

ClassificationResult classify_mobius_strip(const SurfaceMap& f, const ClassifyBudget& budget) {
    if (f.surface() != Surface::MobiusStrip) throw Error("classify_mobius_strip: wrong surface");
    ClassificationResult res;
    res.surface = Surface::MobiusStrip;
    if (near_identity(f)) {
        res.cls = MapClass::Identity;
        return res;
    }
    SurfaceMap doubled = SurfaceMap::double_to_klein(f);
    ClassificationResult inner = classify_klein(doubled, budget);
    res.evidence = inner.evidence;
    res.confidence = inner.confidence;
    switch (inner.cls) {
        case MapClass::Periodic:
            res.cls = MapClass::Periodic;
            res.period = inner.period;
            break;
        case MapClass::KleinPhi:
            res.cls = MapClass::MobiusStrip;
            res.alpha = inner.alpha;
            break;
        case MapClass::KleinPsi:
            res.cls = MapClass::Undetermined;
            res.evidence.notes.push_back("double is of the shifted Klein family, which no "
                                         "strip map induces");
            break;
        default:
            res.cls = inner.cls;
            break;
    }
    return res;
}

ClassificationResult classify(const SurfaceMap& f, const ClassifyBudget& budget) {
    switch (f.surface()) {
        case Surface::Sphere: return classify_sphere(f, budget);
        case Surface::Torus: return classify_torus(f, budget);
        case Surface::Klein: return classify_klein(f, budget);
        case Surface::Annulus: return classify_annulus(f, budget);
        case Surface::MobiusStrip: return classify_mobius_strip(f, budget);
        case Surface::Plane: break;
    }
    throw Error("classify: unsupported surface");
}

}  // namespace kere
