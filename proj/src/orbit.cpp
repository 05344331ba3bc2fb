#include "kere/orbit.hpp"

#include <cmath>

#include "kere/parallel.hpp"
#include "kere/rng.hpp"

namespace kere {

namespace {

constexpr double kPlaneRange = 1e9;

void check_plane_range(const SurfacePoint& p) {
    if (p.surface == Surface::Plane &&
        (std::fabs(p.x()) > kPlaneRange || std::fabs(p.y()) > kPlaneRange))
        throw DivergenceToPole("orbit left the plane chart range");
}

}  // namespace

OrbitSegment orbit(const SurfaceMap& f, const SurfacePoint& x, int n_min, int n_max) {
    require_surface(x, f.surface(), "orbit");
    if (n_min > 0 || n_max < 0 || n_min > n_max) throw Error("orbit: need n_min <= 0 <= n_max");
    OrbitSegment seg;
    seg.base = x;
    seg.n_min = n_min;
    seg.n_max = n_max;
    seg.points.resize(n_max - n_min + 1);
    seg.points[-n_min] = x;
    SurfacePoint p = x;
    for (int n = 1; n <= n_max; ++n) {
        p = f.forward(p);
        check_plane_range(p);
        seg.points[n - n_min] = p;
    }
    p = x;
    for (int n = -1; n >= n_min; --n) {
        p = f.inverse(p);
        check_plane_range(p);
        seg.points[n - n_min] = p;
    }
    return seg;
}

FiniteSet omega_limit(const SurfaceMap& f, const SurfacePoint& x, int burn_in, int horizon,
                      double cluster_eps) {
    require_surface(x, f.surface(), "omega_limit");
    if (burn_in < 0 || burn_in >= horizon) throw Error("omega_limit: need 0 <= burn_in < horizon");
    if (cluster_eps <= 0.0) throw Error("omega_limit: cluster_eps must be positive");
    FiniteSet out;
    out.mesh = cluster_eps;
    SurfacePoint p = x;
    for (int n = 1; n <= horizon; ++n) {
        p = f.forward(p);
        check_plane_range(p);
        if (n < burn_in) continue;
        bool fresh = true;
        for (const auto& q : out.points) {
            if (surface_distance(p, q) <= cluster_eps) {
                fresh = false;
                break;
            }
        }
        if (fresh) out.points.push_back(p);
    }
    return out;
}

FiniteSet alpha_limit(const SurfaceMap& f, const SurfacePoint& x, int burn_in, int horizon,
                      double cluster_eps) {
    return omega_limit(f.inverted(), x, burn_in, horizon, cluster_eps);
}

LimitSetEstimate limit_sets(const SurfaceMap& f, const SurfacePoint& x, int burn_in,
                            int horizon, double cluster_eps) {
    LimitSetEstimate est;
    est.omega = omega_limit(f, x, burn_in, horizon, cluster_eps);
    est.alpha = alpha_limit(f, x, burn_in, horizon, cluster_eps);
    est.burn_in = burn_in;
    est.horizon = horizon;
    est.cluster_eps = cluster_eps;
    return est;
}

namespace {

struct Offset {
    double frac;
    double psi;
};

std::vector<Offset> draw_offsets(int samples, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Offset> out(samples);
    for (auto& o : out) {
        // bias toward the ball boundary; the modulus is a sup over the ball
        // and interior companions only weaken the probe
        o.frac = 0.55 + 0.45 * rng.uniform();
        o.psi = rng.angle();
    }
    return out;
}

SurfacePoint offset_point(const SurfacePoint& x, double dist, double psi) {
    switch (x.surface) {
        case Surface::Sphere: {
            auto [e1, e2] = sphere_tangent_frame(x);
            double c = std::cos(dist), s = std::sin(dist);
            double dx = std::cos(psi), dy = std::sin(psi);
            return sphere_point(c * x.x() + s * (dx * e1[0] + dy * e2[0]),
                                c * x.y() + s * (dx * e1[1] + dy * e2[1]),
                                c * x.z() + s * (dx * e1[2] + dy * e2[2]));
        }
        case Surface::Torus:
            return torus_point(x.s() + dist * std::cos(psi), x.t() + dist * std::sin(psi));
        case Surface::Klein:
            return klein_point(x.s() + dist * std::cos(psi), x.t() + dist * std::sin(psi));
        case Surface::Annulus:
            return annulus_point(std::clamp(x.s() + dist * std::cos(psi), -1.0, 1.0),
                                 x.t() + dist * std::sin(psi));
        case Surface::MobiusStrip:
            return mobius_strip_point(std::clamp(x.s() + dist * std::cos(psi), -1.0, 1.0),
                                      x.t() + dist * std::sin(psi));
        case Surface::Plane:
            return plane_point(x.x() + dist * std::cos(psi), x.y() + dist * std::sin(psi));
    }
    throw Error("offset_point: bad surface");
}

}  // namespace

bool modulus_candidate_passes(const SurfaceMap& f, const SurfacePoint& x, double delta,
                              double eps, int horizon, int samples, std::uint64_t seed) {
    const auto offsets = draw_offsets(samples, seed);

    // base orbit once, companions replayed against it
    std::vector<SurfacePoint> fwd(horizon + 1), bwd(horizon + 1);
    fwd[0] = bwd[0] = x;
    for (int n = 1; n <= horizon; ++n) fwd[n] = f.forward(fwd[n - 1]);
    for (int n = 1; n <= horizon; ++n) bwd[n] = f.inverse(bwd[n - 1]);

    for (const auto& o : offsets) {
        SurfacePoint y0 = offset_point(x, o.frac * delta, o.psi);
        SurfacePoint y = y0;
        for (int n = 1; n <= horizon; ++n) {
            y = f.forward(y);
            double d = surface_distance(y, fwd[n]);
            if (!(d < eps)) return false;
        }
        y = y0;
        for (int n = 1; n <= horizon; ++n) {
            y = f.inverse(y);
            double d = surface_distance(y, bwd[n]);
            if (!(d < eps)) return false;
        }
    }
    return true;
}

EquicontinuityProfile equicontinuity_modulus(const SurfaceMap& f, const SurfacePoint& x,
                                             double eps, int horizon, int samples,
                                             std::uint64_t seed) {
    require_surface(x, f.surface(), "equicontinuity_modulus");
    if (eps <= 0.0) throw Error("equicontinuity_modulus: eps must be positive");
    EquicontinuityProfile prof;
    prof.point = x;
    prof.eps = eps;
    prof.horizon = horizon;
    prof.samples = samples;

    auto passes = [&](double delta) {
        return modulus_candidate_passes(f, x, delta, eps, horizon, samples, seed);
    };

    if (passes(eps)) {
        prof.delta_estimate = eps;
        return prof;
    }
    double lo = 0.0, hi = eps;
    for (int step = 0; step < 10; ++step) {
        double mid = 0.5 * (lo + hi);
        if (passes(mid))
            lo = mid;
        else
            hi = mid;
    }
    if (lo == 0.0) {
        prof.collapsed = true;
        prof.delta_estimate = eps / 1024.0;  // smallest probed candidate
    } else {
        prof.delta_estimate = lo;
    }
    return prof;
}

std::vector<SurfacePoint> surface_grid(Surface s, int resolution) {
    if (resolution < 2) throw Error("surface_grid: resolution too small");
    std::vector<SurfacePoint> grid;
    grid.reserve(static_cast<std::size_t>(resolution) * resolution);
    const double R = resolution;
    for (int i = 0; i < resolution; ++i) {
        for (int j = 0; j < resolution; ++j) {
            double u = (i + 0.5) / R, v = (j + 0.5) / R;
            switch (s) {
                case Surface::Sphere: {
                    double phi = M_PI * u, th = 2.0 * M_PI * v;
                    grid.push_back(sphere_point(std::sin(phi) * std::cos(th),
                                                std::sin(phi) * std::sin(th), std::cos(phi)));
                    break;
                }
                case Surface::Torus:
                    grid.push_back(torus_point(u, v));
                    break;
                case Surface::Klein:
                    grid.push_back(klein_point(0.5 * u, v));
                    break;
                case Surface::Annulus:
                    grid.push_back(annulus_point(-1.0 + 2.0 * u, v));
                    break;
                case Surface::MobiusStrip:
                    grid.push_back(mobius_strip_point(u, v));
                    break;
                case Surface::Plane:
                    grid.push_back(plane_point(-1.0 + 2.0 * u, -1.0 + 2.0 * v));
                    break;
            }
        }
    }
    return grid;
}

double grid_cell_size(Surface s, int resolution) {
    switch (s) {
        case Surface::Sphere: return 2.0 * M_PI / resolution;
        case Surface::Torus: return 1.0 / resolution;
        case Surface::Klein: return 1.0 / resolution;
        case Surface::Annulus: return 2.0 / resolution;
        case Surface::MobiusStrip: return 1.0 / resolution;
        case Surface::Plane: return 2.0 / resolution;
    }
    throw Error("grid_cell_size: bad surface");
}

std::size_t SingularSetEstimate::flag_count() const {
    std::size_t n = 0;
    for (auto b : flagged) n += b;
    return n;
}

double SingularSetEstimate::flagged_fraction() const {
    return flagged.empty() ? 0.0 : double(flag_count()) / double(flagged.size());
}

std::vector<SurfacePoint> SingularSetEstimate::flagged_points() const {
    std::vector<SurfacePoint> out;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (flagged[i]) out.push_back(grid[i]);
    return out;
}

SingularSetEstimate singular_set(const SurfaceMap& f, int grid_resolution, double eps,
                                 int horizon, double threshold, int samples,
                                 std::uint64_t seed) {
    if (grid_resolution < 8) throw Error("singular_set: grid_resolution must be >= 8");
    SingularSetEstimate est;
    est.grid = surface_grid(f.surface(), grid_resolution);
    est.flagged.assign(est.grid.size(), 0);
    est.grid_resolution = grid_resolution;
    est.eps = eps;
    est.threshold = threshold;
    est.horizon = horizon;

    const double delta = threshold * eps;
    parallel_for(est.grid.size(), [&](std::size_t i) {
        bool ok = modulus_candidate_passes(f, est.grid[i], delta, eps, horizon, samples,
                                           subseed(seed, i));
        est.flagged[i] = ok ? 0 : 1;
    });
    return est;
}

bool is_recurrent_point(const SurfaceMap& f, const SurfacePoint& x, int horizon, double eps) {
    require_surface(x, f.surface(), "is_recurrent_point");
    SurfacePoint p = x;
    for (int n = 1; n <= horizon; ++n) {
        p = f.forward(p);
        if (surface_distance(p, x) < eps) return true;
    }
    p = x;
    for (int n = 1; n <= horizon; ++n) {
        p = f.inverse(p);
        if (surface_distance(p, x) < eps) return true;
    }
    return false;
}

MapRecurrence is_recurrent_map(const SurfaceMap& f, int grid_resolution, int horizon,
                               double eps) {
    auto grid = surface_grid(f.surface(), grid_resolution);
    std::vector<SurfacePoint> cur = grid;
    MapRecurrence res;
    res.sup_distance = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= horizon; ++n) {
        double sup = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            cur[i] = f.forward(cur[i]);
            sup = std::max(sup, surface_distance(cur[i], grid[i]));
        }
        res.sup_distance = std::min(res.sup_distance, sup);
        if (sup < eps) {
            res.recurrent = true;
            res.n = n;
            res.sup_distance = sup;
            return res;
        }
    }
    return res;
}

namespace {

// even-odd test of the origin against an unwrapped polygon
bool origin_inside(const std::vector<Vec2>& poly) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if ((a[1] > 0.0) != (b[1] > 0.0)) {
            double xcross = a[0] + (-a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if (xcross > 0.0) inside = !inside;
        }
    }
    return inside;
}

bool point_in_pushed_disc(const SurfacePoint& p, const std::vector<SurfacePoint>& boundary) {
    std::vector<Vec2> poly(boundary.size());
    poly[0] = chart_delta(p, boundary[0]);
    for (std::size_t k = 1; k < boundary.size(); ++k) {
        Vec2 step = chart_delta(boundary[k - 1], boundary[k]);
        poly[k] = Vec2{poly[k - 1][0] + step[0], poly[k - 1][1] + step[1]};
    }
    return origin_inside(poly);
}

}  // namespace

namespace {

// local shrinking-grid descent of d(f(x), x) from a seed
std::pair<SurfacePoint, double> refine_fixed_point(const SurfaceMap& f,
                                                   const SurfacePoint& seed, double cell,
                                                   int rounds) {
    SurfacePoint best = seed;
    double best_d = surface_distance(f.forward(best), best);
    double half = 1.6 * cell;
    for (int round = 0; round < rounds; ++round) {
        SurfacePoint center = best;
        for (int i = -4; i <= 4; ++i) {
            for (int j = -4; j <= 4; ++j) {
                SurfacePoint q = chart_shift(center, Vec2{half * i / 4.0, half * j / 4.0});
                double d = surface_distance(f.forward(q), q);
                if (d < best_d) {
                    best_d = d;
                    best = q;
                }
            }
        }
        half /= 5.0;
    }
    return {best, best_d};
}

}  // namespace

FixedPointCensus fixed_point_census(const SurfaceMap& f, int grid_resolution,
                                    int refine_rounds) {
    FixedPointCensus census;
    const double cell = grid_cell_size(f.surface(), grid_resolution);
    auto grid = surface_grid(f.surface(), grid_resolution);

    std::vector<SurfacePoint> candidates;
    for (const auto& p : grid)
        if (surface_distance(f.forward(p), p) < 2.5 * cell) candidates.push_back(p);
    census.candidate_cells = static_cast<int>(candidates.size());
    if (candidates.empty()) return census;

    int comp_count = 0;
    std::vector<int> comp = epsilon_components(candidates, 3.0 * cell, &comp_count);
    const double certify = cell / 100.0;

    for (int c = 0; c < comp_count; ++c) {
        std::vector<SurfacePoint> cluster;
        for (std::size_t i = 0; i < candidates.size(); ++i)
            if (comp[i] == c) cluster.push_back(candidates[i]);

        // spread seeds by farthest-point selection; a small-displacement
        // halo certifies as a curve only if exact fixed points show up all
        // along it
        std::vector<SurfacePoint> seeds{cluster.front()};
        while (seeds.size() < 8 && seeds.size() < cluster.size()) {
            double best_gap = -1.0;
            SurfacePoint pick = cluster.front();
            for (const auto& p : cluster) {
                double gap = 1e300;
                for (const auto& s : seeds) gap = std::min(gap, surface_distance(p, s));
                if (gap > best_gap) {
                    best_gap = gap;
                    pick = p;
                }
            }
            if (best_gap <= 0.0) break;
            seeds.push_back(pick);
        }

        std::vector<SurfacePoint> certified;
        std::vector<double> cert_d;
        for (const auto& s : seeds) {
            auto [pt, d] = refine_fixed_point(f, s, cell, refine_rounds);
            if (d >= certify) continue;
            bool fresh = true;
            for (std::size_t k = 0; k < certified.size(); ++k) {
                if (surface_distance(pt, certified[k]) <= 3.0 * cell) {
                    fresh = false;
                    if (d < cert_d[k]) {
                        certified[k] = pt;
                        cert_d[k] = d;
                    }
                    break;
                }
            }
            if (fresh) {
                certified.push_back(pt);
                cert_d.push_back(d);
            }
        }
        double spread = 0.0;
        for (std::size_t i = 0; i < certified.size(); ++i)
            for (std::size_t j = i + 1; j < certified.size(); ++j)
                spread = std::max(spread, surface_distance(certified[i], certified[j]));
        if (certified.size() >= 4 && spread > 0.8) {
            census.curve_detected = true;
            census.curve_diameter = std::max(census.curve_diameter, spread);
            continue;
        }
        for (std::size_t k = 0; k < certified.size(); ++k) {
            census.points.push_back(certified[k]);
            census.displacements.push_back(cert_d[k]);
        }
    }
    return census;
}

std::optional<int> orbit_covering_check(const SurfaceMap& f, const SurfacePoint& x,
                                        double U_radius, int N_max, int orbit_span,
                                        int boundary_samples) {
    require_surface(x, f.surface(), "orbit_covering_check");
    if (U_radius <= 0.0 || N_max < 0) throw Error("orbit_covering_check: bad parameters");

    // pushed boundary polylines f^i(bd U)
    std::vector<std::vector<SurfacePoint>> rings(N_max + 1);
    rings[0].resize(boundary_samples);
    for (int k = 0; k < boundary_samples; ++k)
        rings[0][k] = offset_point(x, U_radius, 2.0 * M_PI * k / boundary_samples);
    for (int i = 1; i <= N_max; ++i) {
        rings[i].resize(boundary_samples);
        for (int k = 0; k < boundary_samples; ++k) rings[i][k] = f.forward(rings[i - 1][k]);
    }

    OrbitSegment seg = orbit(f, x, -orbit_span, orbit_span);
    int needed = 0;
    for (const auto& p : seg.points) {
        int found = -1;
        if (surface_distance(p, x) <= U_radius) found = 0;
        for (int i = 1; i <= N_max && found < 0; ++i)
            if (point_in_pushed_disc(p, rings[i])) found = i;
        if (found < 0) return std::nullopt;
        needed = std::max(needed, found);
    }
    return needed;
}

}  // namespace kere
