#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kere/orbit.hpp"
#include "kere/surface_map.hpp"

namespace kere {

enum class MapClass {
    Identity,
    Periodic,
    Elliptic,
    Parabolic,
    Hyperbolic,
    Reflection,
    SemiHyperbolic,
    SemiParabolic,
    SemiElliptic,
    TorusTranslation,
    TorusReversingType1,
    TorusReversingType2,
    KleinPhi,
    KleinPsi,
    AnnulusRotation,
    AnnulusReversing,
    MobiusStrip,
    NotRegular,
    Undetermined,
};

std::string to_string(MapClass c);

struct ClassifyBudget {
    int grid = 64;
    int horizon = 300;
    double eps = 0.1;
    double threshold = 0.08;
    int samples = 6;
    std::uint64_t seed = 0;
    double cluster_cells = 3.0;  // cluster radius in grid cells
    int periodic_max = 512;
    double periodic_tol = 1e-6;
    long rot_horizon = 10000;
    int census_grid = 48;
};

struct ClassificationResult {
    Surface surface = Surface::Sphere;
    MapClass cls = MapClass::Undetermined;
    int period = 0;      // Periodic only
    double alpha = 0.0;  // one-parameter families
    Vec2 rho{0.0, 0.0};  // torus translation vector mod 1

    struct Evidence {
        int singular_clusters = -1;
        int singular_zones = -1;
        double flagged_fraction = -1.0;
        double max_cluster_diameter = 0.0;
        std::vector<SurfacePoint> singular_points;  // zone centroids
        std::optional<Mat2i> homology;
        std::optional<Vec2> rotation_data;
        int fixed_point_count = -1;
        bool fixed_curve = false;
        double omega_alpha_gap = -1.0;
        std::vector<std::string> notes;
    } evidence;

    struct Confidence {
        double decision_margin = 0.0;    // separation of the decisive quantity
        double periodic_residual = -1.0; // grid-sup distance at the period
    } confidence;
};

ClassificationResult classify(const SurfaceMap& f, const ClassifyBudget& budget = {});

/// Orientation-preserving torus lift of a Klein-bottle map.
SurfaceMap klein_oriented_lift(const SurfaceMap& f);
ClassificationResult classify_sphere(const SurfaceMap& f, const ClassifyBudget& budget = {});
ClassificationResult classify_torus(const SurfaceMap& f, const ClassifyBudget& budget = {});
ClassificationResult classify_klein(const SurfaceMap& f, const ClassifyBudget& budget = {});
ClassificationResult classify_annulus(const SurfaceMap& f, const ClassifyBudget& budget = {});
ClassificationResult classify_mobius_strip(const SurfaceMap& f,
                                           const ClassifyBudget& budget = {});

}  // namespace kere
