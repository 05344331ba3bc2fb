#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "kere/orbit.hpp"
#include "kere/rotation.hpp"
#include "kere/surface_map.hpp"

namespace kere {

/// Sampled closed curve or arc; samples are consecutive along the curve.
struct Curve {
    std::vector<SurfacePoint> samples;
    bool closed = true;
    double mesh = 0.0;  // max consecutive spacing

    double invariance_residual(const SurfaceMap& f) const;  // d_H(f(curve), curve)
};

struct TransversalArc {
    std::vector<SurfacePoint> samples;  // ordered from the north to the south end
    std::vector<double> labels;         // strictly increasing orbit labels
    std::vector<double> chain_levels;   // spacing bound per refinement level
};

/// Grid-sampled conjugacy h from a model space onto the surface, with the
/// defining residual sup_u d(h(model(u)), f(h(u))) recorded at build time.
struct ConjugacyMap {
    enum class Model {
        PolarRotation,        // (r, th) -> (r, th + a), r in (0,1]
        TorusTranslation,     // u -> u + rho
        TorusReversingType1,  // (s,t) -> (-s, t + a)
        TorusReversingType2,  // (s,t) -> (-s, t + s + a)
        KleinPhi,             // (s,t) -> (s, t + a) on the oriented cover
        KleinPsi,             // (s,t) -> (s + 1/2, t + a)
    };

    Model model = Model::TorusTranslation;
    Vec2 model_param{0.0, 0.0};  // alpha in [0] or the translation vector
    int rows = 0, cols = 0;
    Surface target_surface = Surface::Torus;
    std::vector<SurfacePoint> values;  // row-major
    double residual = 0.0;
    std::vector<double> beta;  // fiber-shift table for normalization maps

    const SurfacePoint& at(int i, int j) const { return values[i * cols + j]; }
    Vec2 node_coords(int i, int j) const;
    Vec2 model_forward(Vec2 uv) const;
    /// Bilinear chart interpolation of the grid values.
    SurfacePoint eval(Vec2 uv) const;
    /// Reverse interpolation: model coordinates whose image is nearest the
    /// target, refined on the bilinear patch. The node index is built on
    /// first use.
    Vec2 eval_inverse(const SurfacePoint& target) const;

private:
    mutable std::shared_ptr<const std::vector<int>> inverse_index_;
};

/// Largest violation of grid injectivity, as the ratio of the closest
/// image pair to the local neighbor spacing; > 4 means the bijectivity
/// margin holds everywhere (separation >= local mesh / 4).
double grid_injectivity_margin(const ConjugacyMap& h);

/// Residual of the stored grid against f via interpolation of h at the
/// model image. The 3-argument form takes the model as an explicit map
/// acting on the grid coordinates (torus-coordinate grids only).
double conjugacy_residual(const ConjugacyMap& h, const SurfaceMap& f);
double conjugacy_residual(const ConjugacyMap& h, const SurfaceMap& f,
                          const SurfaceMap& model);

struct ConjugacyBudget {
    int grid_r = 64;             // radial / s rows
    int grid_t = 64;             // angular / t columns
    long n_return = 100000;      // closest-return search horizon
    long rho_refine = 10000000;  // lift iterations used to pin the vector
    int arc_levels = 4;
    int circle_samples = 256;
    int max_union_rounds = 400;
    double tol_residual = 0.05;
    std::uint64_t seed = 0;
};

/// Invariant closed curve through the orbit closure of a small circle
/// around the fixed point x: the outer envelope of the iterated-seed
/// union once Hausdorff-stationary. Throws NotStationary when the union
/// escapes or fails to settle within the budget.
Curve invariant_circle(const SurfaceMap& f, const SurfacePoint& x, double seed_radius,
                       const ConjugacyBudget& budget = {});

/// Circle self-map induced by f on an invariant curve, parametrized by
/// normalized chord length.
CircleMap circle_map_on_curve(const SurfaceMap& f, const Curve& gamma);

/// Monotone chain from near `north` to near `south`, refined `levels`
/// times; orbit labels (mean distance to north along the orbit) increase
/// strictly along the arc.
TransversalArc transversal_arc(const SurfaceMap& f, const SurfacePoint& north,
                               const SurfacePoint& south, int levels,
                               const ConjugacyBudget& budget = {});

/// Polar-grid conjugacy h(r, th) = f^{n(th)}(x(r)) against the rigid
/// rotation model, with n chosen by closest measured returns.
ConjugacyMap elliptic_conjugacy(const SurfaceMap& f, const ConjugacyBudget& budget = {});

/// Torus-grid conjugacy to the translation model. Handles the dense case
/// (closest returns of a single orbit) and the mixed case where one
/// rotation-vector component is rational (transversal circle built from a
/// nearly-vertical return, swept by the other component).
ConjugacyMap torus_translation_conjugacy(const SurfaceMap& f,
                                         const ConjugacyBudget& budget = {});

/// For f already in the skew form (s,t) -> (-s, t + a(s)): tabulates a,
/// builds the fiber shift b with a(s) + b(s) - b(-s) constant (type 1) or
/// s + const (type 2), and returns B(s,t) = (s, t + b(s)) with residual
/// against the rigid model.
ConjugacyMap reversing_normalization(const SurfaceMap& f, int type, int s_samples = 1024);

struct KleinNormalization {
    ConjugacyMap B;
    bool psi_form = false;
    double alpha = 0.0;
    double theta_residual = 0.0;     // |B^-1 theta B - standard involution|
    double identity_error = 0.0;     // functional identity on the s-grid
};

/// Normalizes a Klein-bottle pair: the orientation-preserving torus lift
/// f_plus together with the covering involution expressed in the same
/// coordinates as (s,t) -> (-s, t + a(s)). Produces B making the
/// involution standard and f_plus a rigid phi/psi model.
KleinNormalization klein_normalization(const SurfaceMap& f_plus, const SurfaceMap& theta,
                                       int s_samples = 1024);

}  // namespace kere
