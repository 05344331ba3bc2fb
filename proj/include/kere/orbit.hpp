#pragma once

#include <optional>
#include <vector>

#include "kere/finite_set.hpp"
#include "kere/surface_map.hpp"

namespace kere {

struct OrbitSegment {
    SurfacePoint base;
    int n_min = 0;
    int n_max = 0;
    std::vector<SurfacePoint> points;  // indexed n_min..n_max

    const SurfacePoint& at(int n) const { return points.at(n - n_min); }
};

/// Two-sided orbit segment; points[n+1] = f(points[n]) by construction.
OrbitSegment orbit(const SurfaceMap& f, const SurfacePoint& x, int n_min, int n_max);

/// Greedy cluster of the forward orbit tail at radius cluster_eps.
/// Throws DivergenceToPole when a plane orbit leaves the numeric range.
FiniteSet omega_limit(const SurfaceMap& f, const SurfacePoint& x, int burn_in, int horizon,
                      double cluster_eps);
FiniteSet alpha_limit(const SurfaceMap& f, const SurfacePoint& x, int burn_in, int horizon,
                      double cluster_eps);

struct LimitSetEstimate {
    FiniteSet omega;
    FiniteSet alpha;
    int burn_in = 0;
    int horizon = 0;
    double cluster_eps = 0.0;
};

LimitSetEstimate limit_sets(const SurfaceMap& f, const SurfacePoint& x, int burn_in,
                            int horizon, double cluster_eps);

struct EquicontinuityProfile {
    SurfacePoint point;
    double eps = 0.0;
    double delta_estimate = 0.0;
    int horizon = 0;
    int samples = 0;
    bool collapsed = false;  // even the smallest probe separated
};

/// Bisection estimate of the largest delta such that sampled y with
/// d(x,y) < delta stay eps-close to x's orbit over |n| <= horizon.
/// Sample offsets are reused across candidates so the pass test is
/// monotone in delta.
EquicontinuityProfile equicontinuity_modulus(const SurfaceMap& f, const SurfacePoint& x,
                                             double eps, int horizon, int samples,
                                             std::uint64_t seed = 0);

/// Separation test for one candidate delta: true when every sampled
/// companion stays within eps of the base orbit over |n| <= horizon.
bool modulus_candidate_passes(const SurfaceMap& f, const SurfacePoint& x, double delta,
                              double eps, int horizon, int samples, std::uint64_t seed);

struct SingularSetEstimate {
    std::vector<SurfacePoint> grid;
    std::vector<std::uint8_t> flagged;
    int grid_resolution = 0;
    double eps = 0.0;
    double threshold = 0.0;
    int horizon = 0;

    std::size_t flag_count() const;
    double flagged_fraction() const;
    std::vector<SurfacePoint> flagged_points() const;
};

/// Chart-aligned sample grid of a surface (resolution^2 points).
std::vector<SurfacePoint> surface_grid(Surface s, int resolution);
/// Coarse cell pitch of that grid, used for cluster radii.
double grid_cell_size(Surface s, int resolution);

/// Flags grid points whose sampled modulus fails at delta = threshold*eps,
/// i.e. whose modulus estimate is below threshold*eps at this horizon.
SingularSetEstimate singular_set(const SurfaceMap& f, int grid_resolution, double eps,
                                 int horizon, double threshold, int samples = 6,
                                 std::uint64_t seed = 0);

/// Some iterate with 1 <= |n| <= horizon returns x within eps of itself.
bool is_recurrent_point(const SurfaceMap& f, const SurfacePoint& x, int horizon, double eps);

struct MapRecurrence {
    bool recurrent = false;
    int n = 0;            // witness iterate when recurrent
    double sup_distance;  // sup over the grid at the witness (or best seen)
};

/// Searches n in [1, horizon] with sup over the grid of d(f^n(x), x) < eps.
MapRecurrence is_recurrent_map(const SurfaceMap& f, int grid_resolution, int horizon,
                               double eps);

/// Least N <= N_max such that every sampled orbit point lies in some
/// f^i(B(x, U_radius)), i <= N. Disc images are approximated by pushed
/// boundary polylines with an even-odd containment test.
std::optional<int> orbit_covering_check(const SurfaceMap& f, const SurfacePoint& x,
                                        double U_radius, int N_max, int orbit_span = 200,
                                        int boundary_samples = 64);

struct FixedPointCensus {
    std::vector<SurfacePoint> points;       // certified isolated fixed points
    std::vector<double> displacements;      // refined min d(f(x), x) per point
    bool curve_detected = false;            // a one-dimensional fixed locus
    double curve_diameter = 0.0;
    int candidate_cells = 0;
};

/// Locates fixed points by grid minima of d(f(x), x), clustered and
/// refined by shrinking local grids.
FixedPointCensus fixed_point_census(const SurfaceMap& f, int grid_resolution,
                                    int refine_rounds = 4);

}  // namespace kere
