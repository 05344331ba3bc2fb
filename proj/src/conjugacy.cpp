#include "kere/conjugacy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "kere/parallel.hpp"
#include "kere/rng.hpp"

namespace kere {

namespace {

struct Rot3 {
    double m[3][3];

    SurfacePoint apply(const SurfacePoint& p) const {
        return sphere_point(m[0][0] * p.x() + m[0][1] * p.y() + m[0][2] * p.z(),
                            m[1][0] * p.x() + m[1][1] * p.y() + m[1][2] * p.z(),
                            m[2][0] * p.x() + m[2][1] * p.y() + m[2][2] * p.z());
    }

    static Rot3 align(const SurfacePoint& from, const SurfacePoint& to) {
        // Rodrigues rotation taking `from` to `to`
        double ax = from.y() * to.z() - from.z() * to.y();
        double ay = from.z() * to.x() - from.x() * to.z();
        double az = from.x() * to.y() - from.y() * to.x();
        double s = std::sqrt(ax * ax + ay * ay + az * az);
        double c = from.x() * to.x() + from.y() * to.y() + from.z() * to.z();
        Rot3 R{};
        if (s < 1e-12) {
            if (c > 0) {
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) R.m[i][j] = i == j ? 1.0 : 0.0;
                return R;
            }
            // antipodal: rotate by pi around any axis orthogonal to `from`
            auto [e1, e2] = sphere_tangent_frame(from);
            (void)e2;
            ax = e1[0];
            ay = e1[1];
            az = e1[2];
            s = 0.0;
            c = -1.0;
        } else {
            ax /= s;
            ay /= s;
            az /= s;
        }
        double t = 1.0 - c;
        R.m[0][0] = c + ax * ax * t;
        R.m[0][1] = ax * ay * t - az * s;
        R.m[0][2] = ax * az * t + ay * s;
        R.m[1][0] = ay * ax * t + az * s;
        R.m[1][1] = c + ay * ay * t;
        R.m[1][2] = ay * az * t - ax * s;
        R.m[2][0] = az * ax * t - ay * s;
        R.m[2][1] = az * ay * t + ax * s;
        R.m[2][2] = c + az * az * t;
        return R;
    }
};

double circ_diff(double a, double b) {  // signed difference in (-1/2, 1/2]
    double d = reduce_mod1(a - b);
    return d > 0.5 ? d - 1.0 : d;
}

}  // namespace

double Curve::invariance_residual(const SurfaceMap& f) const {
    FiniteSet cur{samples, mesh};
    FiniteSet img;
    img.mesh = mesh;
    for (const auto& p : samples) img.points.push_back(f.forward(p));
    return hausdorff_distance(cur, img);
}

Vec2 ConjugacyMap::node_coords(int i, int j) const {
    if (model == Model::PolarRotation)
        return Vec2{double(i + 1) / rows, double(j) / cols};
    return Vec2{double(i) / rows, double(j) / cols};
}

Vec2 ConjugacyMap::model_forward(Vec2 uv) const {
    double a = model_param[0];
    switch (model) {
        case Model::PolarRotation:
            return Vec2{uv[0], reduce_mod1(uv[1] + a)};
        case Model::TorusTranslation:
            return Vec2{reduce_mod1(uv[0] + model_param[0]), reduce_mod1(uv[1] + model_param[1])};
        case Model::TorusReversingType1:
            return Vec2{reduce_mod1(-uv[0]), reduce_mod1(uv[1] + a)};
        case Model::TorusReversingType2:
            return Vec2{reduce_mod1(-uv[0]), reduce_mod1(uv[1] + uv[0] + a)};
        case Model::KleinPhi:
            return Vec2{reduce_mod1(uv[0]), reduce_mod1(uv[1] + a)};
        case Model::KleinPsi:
            return Vec2{reduce_mod1(uv[0] + 0.5), reduce_mod1(uv[1] + a)};
    }
    throw Error("model_forward: bad model");
}

SurfacePoint ConjugacyMap::eval(Vec2 uv) const {
    int i0, i1;
    double fu;
    if (model == Model::PolarRotation) {
        double fi = uv[0] * rows - 1.0;
        i0 = std::clamp(static_cast<int>(std::floor(fi)), 0, rows - 2);
        i1 = i0 + 1;
        fu = std::clamp(fi - i0, 0.0, 1.0);
    } else {
        double fi = reduce_mod1(uv[0]) * rows;
        i0 = static_cast<int>(std::floor(fi)) % rows;
        i1 = (i0 + 1) % rows;
        fu = fi - std::floor(fi);
    }
    double fj = reduce_mod1(uv[1]) * cols;
    int j0 = static_cast<int>(std::floor(fj)) % cols;
    int j1 = (j0 + 1) % cols;
    double fv = fj - std::floor(fj);

    const SurfacePoint& c00 = at(i0, j0);
    Vec2 d10 = chart_delta(c00, at(i1, j0));
    Vec2 d01 = chart_delta(c00, at(i0, j1));
    Vec2 d11 = chart_delta(c00, at(i1, j1));
    Vec2 off{fu * (1 - fv) * d10[0] + (1 - fu) * fv * d01[0] + fu * fv * d11[0],
             fu * (1 - fv) * d10[1] + (1 - fu) * fv * d01[1] + fu * fv * d11[1]};
    return chart_shift(c00, off);
}

Vec2 ConjugacyMap::eval_inverse(const SurfacePoint& target) const {
    require_surface(target, target_surface, "ConjugacyMap::eval_inverse");
    const int stride_r = std::max(1, rows / 16), stride_c = std::max(1, cols / 16);
    if (!inverse_index_) {
        auto idx = std::make_shared<std::vector<int>>();
        for (int i = 0; i < rows; i += stride_r)
            for (int j = 0; j < cols; j += stride_c) idx->push_back(i * cols + j);
        inverse_index_ = idx;
    }
    int best = (*inverse_index_)[0];
    double best_d = 1e300;
    for (int k : *inverse_index_) {
        double d = surface_distance(values[k], target);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    int bi = best / cols, bj = best % cols;
    for (int i = std::max(0, bi - stride_r); i <= std::min(rows - 1, bi + stride_r); ++i) {
        for (int j = bj - stride_c; j <= bj + stride_c; ++j) {
            int jj = (j + cols) % cols;
            double d = surface_distance(at(i, jj), target);
            if (d < best_d) {
                best_d = d;
                bi = i;
                bj = jj;
            }
        }
    }

    // a couple of Newton steps on the interpolated patch
    Vec2 u = node_coords(bi, bj);
    const double hstep = 0.25 / std::max(rows, cols);
    for (int iter = 0; iter < 3; ++iter) {
        SurfacePoint hu = eval(u);
        Vec2 r = chart_delta(hu, target);
        Vec2 c1 = chart_delta(hu, eval(Vec2{u[0] + hstep, u[1]}));
        Vec2 c2 = chart_delta(hu, eval(Vec2{u[0], u[1] + hstep}));
        double det = c1[0] * c2[1] - c1[1] * c2[0];
        if (std::fabs(det) < 1e-300) break;
        double du = (r[0] * c2[1] - r[1] * c2[0]) / det * hstep;
        double dv = (c1[0] * r[1] - c1[1] * r[0]) / det * hstep;
        u[0] += du;
        u[1] += dv;
        if (model == Model::PolarRotation)
            u[0] = std::clamp(u[0], 1.0 / rows, 1.0);
        else
            u[0] = reduce_mod1(u[0]);
        u[1] = reduce_mod1(u[1]);
    }
    return u;
}

double grid_injectivity_margin(const ConjugacyMap& h) {
    const int R = h.rows, C = h.cols;
    std::vector<double> local(R * C, 1e300);
    auto dist_to = [&](int i, int j, int i2, int j2) {
        return surface_distance(h.at(i, j), h.at(i2, j2));
    };
    for (int i = 0; i < R; ++i) {
        for (int j = 0; j < C; ++j) {
            int jn = (j + 1) % C, jp = (j + C - 1) % C;
            double& m = local[i * C + j];
            m = std::min(m, dist_to(i, j, i, jn));
            m = std::min(m, dist_to(i, j, i, jp));
            if (i + 1 < R) m = std::min(m, dist_to(i, j, i + 1, j));
            if (i > 0) m = std::min(m, dist_to(i, j, i - 1, j));
        }
    }
    double margin = 1e300;
    const std::size_t n = h.values.size();
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            // neighbors along a row/column define the local mesh itself
            if (b == a + 1 && (b % C) != 0) continue;
            if (b == a + C) continue;
            double d = surface_distance(h.values[a], h.values[b]);
            double ref = std::min(local[a], local[b]);
            if (ref > 0.0) margin = std::min(margin, d / ref);
        }
    }
    return margin;
}

double conjugacy_residual(const ConjugacyMap& h, const SurfaceMap& f) {
    double worst = 0.0;
    for (int i = 0; i < h.rows; ++i) {
        for (int j = 0; j < h.cols; ++j) {
            Vec2 mu = h.model_forward(h.node_coords(i, j));
            worst = std::max(worst,
                             surface_distance(h.eval(mu), f.forward(h.at(i, j))));
        }
    }
    return worst;
}

double conjugacy_residual(const ConjugacyMap& h, const SurfaceMap& f,
                          const SurfaceMap& model) {
    if (h.model == ConjugacyMap::Model::PolarRotation)
        throw Error("conjugacy_residual: explicit model needs torus grid coordinates");
    if (model.surface() != Surface::Torus)
        throw Error("conjugacy_residual: model must act on torus coordinates");
    double worst = 0.0;
    for (int i = 0; i < h.rows; ++i) {
        for (int j = 0; j < h.cols; ++j) {
            Vec2 u = h.node_coords(i, j);
            SurfacePoint mu = model.forward(torus_point(u[0], u[1]));
            worst = std::max(worst, surface_distance(h.eval(Vec2{mu.s(), mu.t()}),
                                                     f.forward(h.at(i, j))));
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// invariant circle via the stationary union of an iterated seed circle
// ---------------------------------------------------------------------------

namespace {

struct SpatialHash {
    double cell;
    std::unordered_map<long long, std::vector<int>> buckets;
    std::vector<SurfacePoint> pts;

    explicit SpatialHash(double c) : cell(c) {}

    long long key(const SurfacePoint& p) const {
        auto q = [&](double v) { return static_cast<long long>(std::floor(v / cell)); };
        return (q(p.x()) * 73856093LL) ^ (q(p.y()) * 19349663LL) ^ (q(p.z()) * 83492791LL);
    }

    double nearest(const SurfacePoint& p) const {
        double best = 1e300;
        auto q = [&](double v) { return static_cast<long long>(std::floor(v / cell)); };
        long long qx = q(p.x()), qy = q(p.y()), qz = q(p.z());
        for (long long dx = -1; dx <= 1; ++dx)
            for (long long dy = -1; dy <= 1; ++dy)
                for (long long dz = -1; dz <= 1; ++dz) {
                    long long k = ((qx + dx) * 73856093LL) ^ ((qy + dy) * 19349663LL) ^
                                  ((qz + dz) * 83492791LL);
                    auto it = buckets.find(k);
                    if (it == buckets.end()) continue;
                    for (int idx : it->second)
                        best = std::min(best, surface_distance(p, pts[idx]));
                }
        return best;
    }

    void insert(const SurfacePoint& p) {
        pts.push_back(p);
        buckets[key(p)].push_back(static_cast<int>(pts.size()) - 1);
    }
};

}  // namespace

Curve invariant_circle(const SurfaceMap& f, const SurfacePoint& x, double seed_radius,
                       const ConjugacyBudget& budget) {
    if (f.surface() != Surface::Sphere)
        throw Error("invariant_circle: implemented for sphere maps");
    require_surface(x, Surface::Sphere, "invariant_circle");
    const int M = budget.circle_samples;
    const double spacing = 2.0 * M_PI * seed_radius / M;
    const double dedup = 0.5 * spacing;
    const double mesh_target = 2.0 * dedup;
    const double escape = std::min(2.8, 4.0 * seed_radius + 0.3);

    Rot3 R = Rot3::align(x, south_pole());
    auto to_chart = [&](const SurfacePoint& p) { return sphere_to_plane(R.apply(p)); };

    auto [e1, e2] = sphere_tangent_frame(x);
    std::vector<SurfacePoint> seed(M);
    for (int k = 0; k < M; ++k) {
        double th = 2.0 * M_PI * k / M;
        double c = std::cos(seed_radius), s = std::sin(seed_radius);
        double dx = std::cos(th), dy = std::sin(th);
        seed[k] = sphere_point(c * x.x() + s * (dx * e1[0] + dy * e2[0]),
                               c * x.y() + s * (dx * e1[1] + dy * e2[1]),
                               c * x.z() + s * (dx * e1[2] + dy * e2[2]));
    }

    SpatialHash hash(std::max(dedup, 1e-6));
    for (const auto& p : seed) hash.insert(p);
    std::vector<SurfacePoint> fwd = seed, bwd = seed;

    bool stationary = false;
    for (int round = 0; round < budget.max_union_rounds && !stationary; ++round) {
        std::vector<SurfacePoint> next_fwd, next_bwd;
        double round_max = 0.0;
        auto push = [&](SurfacePoint q, std::vector<SurfacePoint>& sink) {
            if (surface_distance(q, x) > escape)
                throw NotStationary("invariant_circle: seed orbit escaped the neighborhood");
            double d = hash.nearest(q);
            if (d > dedup) {
                round_max = std::max(round_max, d);
                hash.insert(q);
                sink.push_back(q);
            }
        };
        for (const auto& p : fwd) push(f.forward(p), next_fwd);
        for (const auto& p : bwd) push(f.inverse(p), next_bwd);
        if (hash.pts.size() > 200000)
            throw NotStationary("invariant_circle: union kept growing");
        fwd = std::move(next_fwd);
        bwd = std::move(next_bwd);
        stationary = round_max < mesh_target;
    }
    if (!stationary) throw NotStationary("invariant_circle: union did not settle in budget");

    // outer envelope by angular sweep in the centered chart
    std::vector<double> best_r(M, -1.0);
    std::vector<Complex> best_z(M);
    for (const auto& p : hash.pts) {
        Complex z = to_chart(p);
        double r = std::abs(z);
        if (r == 0.0) continue;
        int b = static_cast<int>(std::floor(reduce_mod1(std::arg(z) / (2.0 * M_PI)) * M)) % M;
        if (r > best_r[b]) {
            best_r[b] = r;
            best_z[b] = z;
        }
    }
    int empty = 0;
    for (int b = 0; b < M; ++b)
        if (best_r[b] < 0.0) ++empty;
    if (empty > M / 4)
        throw NotStationary("invariant_circle: angular sweep has empty sectors");
    for (int b = 0; b < M; ++b) {
        if (best_r[b] >= 0.0) continue;
        int lo = b, hi = b;
        while (best_r[(lo + M - 1) % M] < 0.0) lo = (lo + M - 1) % M;
        while (best_r[(hi + 1) % M] < 0.0) hi = (hi + 1) % M;
        lo = (lo + M - 1) % M;
        hi = (hi + 1) % M;
        double r = 0.5 * (best_r[lo] + best_r[hi]);
        double th = 2.0 * M_PI * (b + 0.5) / M;
        best_z[b] = Complex(r * std::cos(th), r * std::sin(th));
        best_r[b] = r;
    }

    Curve gamma;
    gamma.closed = true;
    gamma.samples.resize(M);
    Rot3 Rback = Rot3::align(south_pole(), x);
    for (int b = 0; b < M; ++b) gamma.samples[b] = Rback.apply(sphere_from_plane(best_z[b]));
    for (int b = 0; b < M; ++b)
        gamma.mesh = std::max(gamma.mesh,
                              surface_distance(gamma.samples[b], gamma.samples[(b + 1) % M]));
    return gamma;
}

// ---------------------------------------------------------------------------
// circle map induced on an invariant curve
// ---------------------------------------------------------------------------

namespace {

// locate the closest polyline parameter for q; params normalized to [0,1)
std::pair<double, double> project_to_polyline(const std::vector<SurfacePoint>& pts,
                                              const std::vector<double>& params,
                                              const SurfacePoint& q) {
    const std::size_t M = pts.size();
    std::size_t best_k = 0;
    double best_d = 1e300;
    for (std::size_t k = 0; k < M; ++k) {
        double d = surface_distance(q, pts[k]);
        if (d < best_d) {
            best_d = d;
            best_k = k;
        }
    }
    double best_param = params[best_k];
    double best_dist = best_d;
    for (int side = -1; side <= 1; side += 2) {
        std::size_t k2 = (best_k + M + side) % M;
        Vec2 B = chart_delta(pts[best_k], pts[k2]);
        Vec2 P = chart_delta(pts[best_k], q);
        double bb = B[0] * B[0] + B[1] * B[1];
        if (bb < 1e-300) continue;
        double tau = std::clamp((P[0] * B[0] + P[1] * B[1]) / bb, 0.0, 1.0);
        double dx = P[0] - tau * B[0], dy = P[1] - tau * B[1];
        double d = std::hypot(dx, dy);
        if (d < best_dist) {
            best_dist = d;
            double span = reduce_mod1(params[k2] - params[best_k]);
            if (side < 0) span -= 1.0;  // stepping backwards along the cycle
            best_param = reduce_mod1(params[best_k] + tau * span);
        }
    }
    return {best_param, best_dist};
}

}  // namespace

CircleMap circle_map_on_curve(const SurfaceMap& f, const Curve& gamma) {
    if (!gamma.closed || gamma.samples.size() < 8)
        throw Error("circle_map_on_curve: need a closed sampled curve");
    const std::size_t M = gamma.samples.size();

    std::vector<double> params(M, 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < M; ++k) {
        total += surface_distance(gamma.samples[k], gamma.samples[k + 1]);
        params[k + 1] = total;
    }
    total += surface_distance(gamma.samples[M - 1], gamma.samples[0]);
    if (total <= 0.0) throw Error("circle_map_on_curve: degenerate curve");
    for (auto& u : params) u /= total;

    std::vector<double> v(M);
    for (std::size_t k = 0; k < M; ++k)
        v[k] = project_to_polyline(gamma.samples, params, f.forward(gamma.samples[k])).first;

    // unwrap the image parameters; a degree-one restriction advances by
    // exactly one turn over the cycle
    std::vector<double> lifted(M + 1);
    lifted[0] = v[0];
    for (std::size_t k = 1; k < M; ++k)
        lifted[k] = lifted[k - 1] + reduce_mod1(v[k] - v[k - 1]);
    lifted[M] = lifted[M - 1] + reduce_mod1(v[0] - v[M - 1]);
    if (std::fabs((lifted[M] - lifted[0]) - 1.0) > 0.25)
        throw NotDegreeOne("curve restriction does not advance by one turn");
    for (std::size_t k = 1; k <= M; ++k)
        if (lifted[k] <= lifted[k - 1]) lifted[k] = lifted[k - 1] + 1e-12;

    std::vector<double> knots(params);
    knots.push_back(1.0);

    auto lift_fn = [knots, lifted](double xx) {
        double k = std::floor(xx);
        double u = xx - k;
        auto it = std::upper_bound(knots.begin(), knots.end(), u);
        std::size_t hi = std::min<std::size_t>(it - knots.begin(), knots.size() - 1);
        std::size_t lo = hi - 1;
        double span = knots[hi] - knots[lo];
        double fr = span > 0.0 ? (u - knots[lo]) / span : 0.0;
        return k + lifted[lo] + fr * (lifted[hi] - lifted[lo]);
    };
    return CircleMap::from_lift(lift_fn);
}

// ---------------------------------------------------------------------------
// transversal arc by monotone chain refinement
// ---------------------------------------------------------------------------

namespace {

SurfacePoint geodesic_between(const SurfacePoint& a, const SurfacePoint& b, double tau) {
    double omega = surface_distance(a, b);
    if (omega < 1e-12) return a;
    if (omega > M_PI - 1e-9) {
        auto [e1, e2] = sphere_tangent_frame(a);
        (void)e2;
        double ang = tau * M_PI;
        return sphere_point(std::cos(ang) * a.x() + std::sin(ang) * e1[0],
                            std::cos(ang) * a.y() + std::sin(ang) * e1[1],
                            std::cos(ang) * a.z() + std::sin(ang) * e1[2]);
    }
    double sa = std::sin((1.0 - tau) * omega) / std::sin(omega);
    double sb = std::sin(tau * omega) / std::sin(omega);
    return sphere_point(sa * a.x() + sb * b.x(), sa * a.y() + sb * b.y(),
                        sa * a.z() + sb * b.z());
}

double orbit_label(const SurfaceMap& f, const SurfacePoint& p, const SurfacePoint& north,
                   int span = 64) {
    double acc = 0.0;
    SurfacePoint q = p;
    for (int k = 0; k < span; ++k) {
        acc += surface_distance(q, north);
        q = f.forward(q);
    }
    return acc / span;
}

}  // namespace

TransversalArc transversal_arc(const SurfaceMap& f, const SurfacePoint& north,
                               const SurfacePoint& south, int levels,
                               const ConjugacyBudget& budget) {
    (void)budget;
    if (f.surface() != Surface::Sphere)
        throw Error("transversal_arc: implemented for sphere maps");
    const double omega = surface_distance(north, south);
    if (omega < 0.1) throw Error("transversal_arc: endpoints too close");

    const int K0 = 32;
    std::vector<SurfacePoint> chain;
    std::vector<double> labels;
    for (int k = 0; k <= K0; ++k) {
        double tau = 0.02 + 0.96 * k / K0;
        SurfacePoint p = geodesic_between(north, south, tau);
        double lab = orbit_label(f, p, north);
        if (!labels.empty() && lab <= labels.back() + 1e-12) continue;
        chain.push_back(p);
        labels.push_back(lab);
    }
    if (chain.size() < static_cast<std::size_t>(K0 / 2))
        throw ChainStuck("level 0: orbit labels not monotone along the path");
    TransversalArc arc;
    double gap0 = 0.0;
    for (std::size_t k = 0; k + 1 < chain.size(); ++k)
        gap0 = std::max(gap0, surface_distance(chain[k], chain[k + 1]));
    if (gap0 > 4.0 * omega / K0)
        throw ChainStuck("level 0: gap " + std::to_string(gap0) + " exceeds the chain bound");
    arc.chain_levels.push_back(gap0);

    for (int level = 1; level <= levels; ++level) {
        std::vector<SurfacePoint> next;
        std::vector<double> next_lab;
        next.push_back(chain[0]);
        next_lab.push_back(labels[0]);
        for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
            const SurfacePoint& a = chain[k];
            const SurfacePoint& b = chain[k + 1];
            for (double tau : {0.5, 0.35, 0.65}) {
                SurfacePoint m = geodesic_between(a, b, tau);
                double lab = orbit_label(f, m, north);
                if (lab > labels[k] + 1e-12 && lab < labels[k + 1] - 1e-12) {
                    next.push_back(m);
                    next_lab.push_back(lab);
                    break;
                }
            }
            next.push_back(b);
            next_lab.push_back(labels[k + 1]);
        }
        chain = std::move(next);
        labels = std::move(next_lab);
        double gap = 0.0;
        for (std::size_t k = 0; k + 1 < chain.size(); ++k)
            gap = std::max(gap, surface_distance(chain[k], chain[k + 1]));
        arc.chain_levels.push_back(gap);
    }
    arc.samples = std::move(chain);
    arc.labels = std::move(labels);
    return arc;
}

// ---------------------------------------------------------------------------
// polar conjugacy for the rotation-like sphere maps
// ---------------------------------------------------------------------------

namespace {

struct ArcParam {
    std::vector<SurfacePoint> pts;
    std::vector<double> cum;  // normalized chord length in [0,1]

    explicit ArcParam(const std::vector<SurfacePoint>& samples) : pts(samples) {
        cum.resize(pts.size(), 0.0);
        for (std::size_t k = 1; k < pts.size(); ++k)
            cum[k] = cum[k - 1] + surface_distance(pts[k - 1], pts[k]);
        double total = cum.back();
        if (total <= 0.0) throw Error("arc parametrization: degenerate arc");
        for (auto& c : cum) c /= total;
    }

    SurfacePoint at(double r) const {
        r = std::clamp(r, 0.0, 1.0);
        auto it = std::upper_bound(cum.begin(), cum.end(), r);
        std::size_t hi = std::clamp<std::size_t>(it - cum.begin(), 1, cum.size() - 1);
        std::size_t lo = hi - 1;
        double span = cum[hi] - cum[lo];
        double fr = span > 0.0 ? (r - cum[lo]) / span : 0.0;
        Vec2 d = chart_delta(pts[lo], pts[hi]);
        return chart_shift(pts[lo], Vec2{fr * d[0], fr * d[1]});
    }
};

// best return index per phase bin over one measured orbit
struct ReturnTable {
    int bins;
    std::vector<long> n_of_bin;
    std::vector<double> phase_of_bin;

    long lookup(double theta, double* achieved = nullptr) const {
        theta = reduce_mod1(theta);
        int b = static_cast<int>(std::floor(theta * bins)) % bins;
        long best_n = -1;
        double best_d = 1e300;
        for (int off = -2; off <= 2; ++off) {
            int bb = (b + off + bins) % bins;
            if (n_of_bin[bb] < 0) continue;
            double d = std::fabs(circ_diff(phase_of_bin[bb], theta));
            if (d < best_d) {
                best_d = d;
                best_n = n_of_bin[bb];
            }
        }
        if (best_n < 0) throw Error("return table: empty phase sector");
        if (achieved) *achieved = best_d;
        return best_n;
    }
};

}  // namespace

ConjugacyMap elliptic_conjugacy(const SurfaceMap& f, const ConjugacyBudget& budget) {
    if (f.surface() != Surface::Sphere)
        throw Error("elliptic_conjugacy: sphere maps only");
    FixedPointCensus census = fixed_point_census(f, 48);
    if (census.curve_detected || census.points.size() != 2)
        throw Error("elliptic_conjugacy: expected exactly two fixed points, found " +
                    std::to_string(census.points.size()));
    const SurfacePoint north = census.points[0];
    const SurfacePoint south = census.points[1];

    TransversalArc arc = transversal_arc(f, north, south, budget.arc_levels, budget);
    ArcParam param(arc.samples);

    Rot3 R = Rot3::align(north, south_pole());
    auto phase = [&](const SurfacePoint& p) {
        Complex z = sphere_to_plane(R.apply(p));
        return reduce_mod1(std::arg(z) / (2.0 * M_PI));
    };

    // measured phases of one reference orbit drive the return choices
    const long N = budget.n_return;
    SurfacePoint ref = param.at(0.55);
    ReturnTable table;
    table.bins = 32 * budget.grid_t;
    table.n_of_bin.assign(table.bins, -1);
    table.phase_of_bin.assign(table.bins, 0.0);

    double phase0 = phase(ref);
    double prev = phase0;
    double sin_acc = 0.0, cos_acc = 0.0;
    SurfacePoint p = ref;
    for (long n = 0; n <= N; ++n) {
        double ph = phase(p);
        if (n > 0) {
            double inc = reduce_mod1(ph - prev);
            sin_acc += std::sin(2.0 * M_PI * inc);
            cos_acc += std::cos(2.0 * M_PI * inc);
        }
        prev = ph;
        double rel = reduce_mod1(ph - phase0);
        int b = static_cast<int>(std::floor(rel * table.bins)) % table.bins;
        double center = (b + 0.5) / table.bins;
        if (table.n_of_bin[b] < 0 ||
            std::fabs(circ_diff(rel, center)) <
                std::fabs(circ_diff(table.phase_of_bin[b], center))) {
            table.n_of_bin[b] = n;
            table.phase_of_bin[b] = rel;
        }
        p = f.forward(p);
    }
    int filled = 0;
    for (int b = 0; b < table.bins; ++b)
        if (table.n_of_bin[b] >= 0) ++filled;
    if (filled < table.bins / 4)
        throw Error("elliptic_conjugacy: rotation number too close to rational; "
                    "dense returns unavailable");
    double alpha = reduce_mod1(std::atan2(sin_acc, cos_acc) / (2.0 * M_PI));

    const int RR = budget.grid_r, CC = budget.grid_t;
    std::vector<long> n_col(CC);
    long n_max = 0;
    for (int j = 0; j < CC; ++j) {
        n_col[j] = table.lookup(double(j) / CC);
        n_max = std::max(n_max, n_col[j]);
    }

    ConjugacyMap h;
    h.model = ConjugacyMap::Model::PolarRotation;
    h.model_param = Vec2{alpha, 0.0};
    h.rows = RR;
    h.cols = CC;
    h.target_surface = Surface::Sphere;
    h.values.resize(std::size_t(RR) * CC);

    // needed iterates per column, swept once per radial row
    std::map<long, std::vector<int>> needed;
    for (int j = 0; j < CC; ++j) needed[n_col[j]].push_back(j);
    parallel_for(RR, [&](std::size_t i) {
        SurfacePoint q = param.at(double(i + 1) / RR);
        auto it = needed.begin();
        for (long n = 0; n <= n_max && it != needed.end(); ++n) {
            while (it != needed.end() && it->first == n) {
                for (int j : it->second) h.values[i * CC + j] = q;
                ++it;
            }
            q = f.forward(q);
        }
    });

    h.residual = conjugacy_residual(h, f);
    if (h.residual > budget.tol_residual)
        throw ResidualTooLarge("elliptic_conjugacy: residual " + std::to_string(h.residual));
    return h;
}

// ---------------------------------------------------------------------------
// torus conjugacies
// ---------------------------------------------------------------------------

namespace {

Vec2 refine_translation_vector(const SurfaceMap& f, long iters) {
    Vec2 x{0.31, 0.57};
    Vec2 p = x;
    for (long n = 0; n < iters; ++n) p = f.lift_forward(p);
    return Vec2{(p[0] - x[0]) / double(iters), (p[1] - x[1]) / double(iters)};
}

std::optional<int> rational_denominator(double v, int q_max, double tol) {
    for (int q = 1; q <= q_max; ++q) {
        double m = v * q;
        if (std::fabs(m - std::round(m)) < tol * q) return q;
    }
    return std::nullopt;
}

struct NodeReturns {
    int R, C;
    std::vector<long> best_n;
    std::vector<Vec2> best_q;

    long lookup(Vec2 u) const {
        int i = static_cast<int>(std::lround(reduce_mod1(u[0]) * R)) % R;
        int j = static_cast<int>(std::lround(reduce_mod1(u[1]) * C)) % C;
        long n = -1;
        double best = 1e300;
        for (int di = -1; di <= 1; ++di) {
            for (int dj = -1; dj <= 1; ++dj) {
                int ii = (i + di + R) % R, jj = (j + dj + C) % C;
                long cand = best_n[ii * C + jj];
                if (cand < 0) continue;
                Vec2 q = best_q[ii * C + jj];
                double d = std::hypot(circ_diff(q[0], u[0]), circ_diff(q[1], u[1]));
                if (d < best) {
                    best = d;
                    n = cand;
                }
            }
        }
        if (n < 0) throw Error("return grid: empty sector");
        return n;
    }
};

// snapshot requested iterates of a batch of base points in one sweep
std::vector<std::vector<SurfacePoint>> orbit_snapshots(
    const SurfaceMap& f, const std::vector<SurfacePoint>& bases,
    const std::vector<long>& wanted) {
    std::vector<long> sorted(wanted);
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<std::vector<SurfacePoint>> out(wanted.size());

    std::vector<std::vector<SurfacePoint>> snaps(sorted.size(),
                                                 std::vector<SurfacePoint>(bases.size()));
    parallel_for(bases.size(), [&](std::size_t b) {
        SurfacePoint q = bases[b];
        std::size_t si = 0;
        long n = 0;
        while (si < sorted.size()) {
            if (n == sorted[si]) {
                snaps[si][b] = q;
                ++si;
                continue;
            }
            q = f.forward(q);
            ++n;
        }
    });
    for (std::size_t w = 0; w < wanted.size(); ++w) {
        auto it = std::lower_bound(sorted.begin(), sorted.end(), wanted[w]);
        out[w] = snaps[it - sorted.begin()];
    }
    return out;
}

ConjugacyMap dense_torus_conjugacy(const SurfaceMap& f, Vec2 rho,
                                   const ConjugacyBudget& budget) {
    const int R = budget.grid_r, C = budget.grid_t;
    NodeReturns table;
    table.R = R;
    table.C = C;
    table.best_n.assign(std::size_t(R) * C, -1);
    table.best_q.resize(std::size_t(R) * C);

    for (long n = 0; n <= budget.n_return; ++n) {
        Vec2 q{reduce_mod1(n * rho[0]), reduce_mod1(n * rho[1])};
        int i = static_cast<int>(std::lround(q[0] * R)) % R;
        int j = static_cast<int>(std::lround(q[1] * C)) % C;
        Vec2 node{double(i) / R, double(j) / C};
        double d = std::hypot(circ_diff(q[0], node[0]), circ_diff(q[1], node[1]));
        std::size_t idx = std::size_t(i) * C + j;
        if (table.best_n[idx] < 0 ||
            d < std::hypot(circ_diff(table.best_q[idx][0], node[0]),
                           circ_diff(table.best_q[idx][1], node[1]))) {
            table.best_n[idx] = n;
            table.best_q[idx] = q;
        }
    }
    for (std::size_t k = 0; k < table.best_n.size(); ++k)
        if (table.best_n[k] < 0)
            throw Error("torus_translation_conjugacy: return grid has holes; "
                        "vector too close to resonance");

    ConjugacyMap h;
    h.model = ConjugacyMap::Model::TorusTranslation;
    h.model_param = Vec2{reduce_mod1(rho[0]), reduce_mod1(rho[1])};
    h.rows = R;
    h.cols = C;
    h.target_surface = Surface::Torus;
    h.values.resize(std::size_t(R) * C);

    SurfacePoint x0 = torus_point(0.0, 0.0);
    std::map<long, std::vector<std::size_t>> needed;
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j)
            needed[table.lookup(Vec2{double(i) / R, double(j) / C})].push_back(
                std::size_t(i) * C + j);
    SurfacePoint q = x0;
    long n = 0;
    for (auto& [want_n, slots] : needed) {
        while (n < want_n) {
            q = f.forward(q);
            ++n;
        }
        for (auto idx : slots) h.values[idx] = q;
    }

    h.residual = conjugacy_residual(h, f);
    if (h.residual > budget.tol_residual)
        throw ResidualTooLarge("torus_translation_conjugacy: residual " +
                               std::to_string(h.residual));
    return h;
}

ConjugacyMap mixed_torus_conjugacy(const SurfaceMap& f, Vec2 rho, int q,
                                   const ConjugacyBudget& budget) {
    const int R = budget.grid_r, C = budget.grid_t;

    SurfacePoint x0 = torus_point(0.13, 0.29);
    const int K = std::max(8, R / q);
    std::vector<SurfacePoint> sigma;
    sigma.reserve(std::size_t(K) * q);
    if (q == 1) {
        // orbit closures are single vertical circles; a plain horizontal
        // loop meets each of them
        for (int k = 0; k < K; ++k)
            sigma.push_back(torus_point(x0.s() + double(k) / K, x0.t()));
    } else {
        // nearly-vertical return g ~ translation by (1/q, 0)
        long n_g = -1;
        double best = 1e300;
        for (long n = 1; n <= budget.n_return; ++n) {
            double ds = std::fabs(circ_diff(reduce_mod1(n * rho[0]), 1.0 / q));
            if (ds > 1e-6) continue;
            double dt = std::fabs(circ_diff(reduce_mod1(n * rho[1]), 0.0));
            if (dt < best) {
                best = dt;
                n_g = n;
            }
        }
        if (n_g < 0 || best > 0.02)
            throw ChainStuck("mixed case: no usable short return toward the rational direction");

        // transversal circle: chord to g(x0), swept by g around the s direction
        SurfacePoint gx = x0;
        for (long i = 0; i < n_g; ++i) gx = f.forward(gx);
        Vec2 delta = chart_delta(x0, gx);
        std::vector<SurfacePoint> seg(K);
        for (int k = 0; k < K; ++k)
            seg[k] = chart_shift(x0, Vec2{delta[0] * k / K, delta[1] * k / K});
        for (int copy = 0; copy < q; ++copy) {
            for (const auto& pmt : seg) sigma.push_back(pmt);
            if (copy + 1 < q)
                for (auto& pt : seg)
                    for (long i = 0; i < n_g; ++i) pt = f.forward(pt);
        }
    }
    const int S = static_cast<int>(sigma.size());
    auto sigma_at = [&](double s) {
        double fs = reduce_mod1(s) * S;
        int lo = static_cast<int>(std::floor(fs)) % S;
        int hi = (lo + 1) % S;
        double fr = fs - std::floor(fs);
        Vec2 d = chart_delta(sigma[lo], sigma[hi]);
        return chart_shift(sigma[lo], Vec2{fr * d[0], fr * d[1]});
    };

    // vertical sweep: returns with s-phase at a multiple of 1 (mod 1)
    std::vector<long> m_of_bin(C, -1);
    std::vector<double> t_of_bin(C, 0.0);
    for (long n = 0; n <= budget.n_return; ++n) {
        if (std::fabs(circ_diff(reduce_mod1(n * rho[0]), 0.0)) > 1e-6) continue;
        double t = reduce_mod1(n * rho[1]);
        int b = static_cast<int>(std::lround(t * C)) % C;
        double center = double(b) / C;
        if (m_of_bin[b] < 0 ||
            std::fabs(circ_diff(t, center)) < std::fabs(circ_diff(t_of_bin[b], center))) {
            m_of_bin[b] = n;
            t_of_bin[b] = t;
        }
    }
    auto m_of = [&](double t) {
        int b = static_cast<int>(std::lround(reduce_mod1(t) * C)) % C;
        long m = -1;
        double bd = 1e300;
        for (int off = -1; off <= 1; ++off) {
            int bb = (b + off + C) % C;
            if (m_of_bin[bb] < 0) continue;
            double d = std::fabs(circ_diff(t_of_bin[bb], t));
            if (d < bd) {
                bd = d;
                m = m_of_bin[bb];
            }
        }
        if (m < 0) throw Error("mixed case: vertical sweep has holes");
        return m;
    };

    ConjugacyMap h;
    h.model = ConjugacyMap::Model::TorusTranslation;
    h.model_param = Vec2{reduce_mod1(rho[0]), reduce_mod1(rho[1])};
    h.rows = R;
    h.cols = C;
    h.target_surface = Surface::Torus;
    h.values.resize(std::size_t(R) * C);

    std::vector<SurfacePoint> bases(R);
    for (int i = 0; i < R; ++i) bases[i] = sigma_at(double(i) / R);
    std::vector<long> wanted;
    for (int j = 0; j < C; ++j) wanted.push_back(m_of(double(j) / C));
    auto snaps = orbit_snapshots(f, bases, wanted);
    for (int j = 0; j < C; ++j)
        for (int i = 0; i < R; ++i) h.values[std::size_t(i) * C + j] = snaps[j][i];

    h.residual = conjugacy_residual(h, f);
    if (h.residual > budget.tol_residual)
        throw ResidualTooLarge("torus_translation_conjugacy: residual " +
                               std::to_string(h.residual));
    return h;
}

}  // namespace

ConjugacyMap torus_translation_conjugacy(const SurfaceMap& f, const ConjugacyBudget& budget) {
    if (f.surface() != Surface::Torus)
        throw Error("torus_translation_conjugacy: torus maps only");
    Mat2i A = homology_matrix_of(f);
    if (!(A == Mat2i::identity()))
        throw NonTrivialHomology("torus_translation_conjugacy: lattice action is not trivial");

    Vec2 rho = refine_translation_vector(f, budget.rho_refine);
    auto q1 = rational_denominator(rho[0], 32, 1e-6);
    auto q2 = rational_denominator(rho[1], 32, 1e-6);
    if (q1 && q2)
        throw Error("torus_translation_conjugacy: both components rational; map is periodic-like");
    if (!q1 && q2)
        throw Error("torus_translation_conjugacy: rational direction must be the first "
                    "coordinate in this build");
    if (q1) {
        // snap to the exact rational so long-return phase arithmetic stays clean
        rho[0] = std::round(rho[0] * *q1) / *q1;
        return mixed_torus_conjugacy(f, rho, *q1, budget);
    }
    return dense_torus_conjugacy(f, rho, budget);
}

// ---------------------------------------------------------------------------
// skew normalizations
// ---------------------------------------------------------------------------

namespace {

// fiber shift of a skew map (s,t) -> (-s, t + a(s)); validates the form
// and returns the table of a over s_k = k/S, unwrapped to a real function
// whose winding over one turn is `degree` (0 for type 1 and the covering
// involution, 1 for type 2 where a(s) = s + const)
std::vector<double> tabulate_fiber_shift(const SurfaceMap& f, int S, const char* who,
                                         int* winding_out = nullptr) {
    std::vector<double> a(S + 1);
    std::vector<double> raw(S + 1);
    for (int k = 0; k <= S; ++k) {
        double s = double(k) / S;
        for (double t0 : {0.17, 0.52, 0.86}) {
            SurfacePoint img = f.forward(torus_point(s, t0));
            if (circle_dist(img.s(), reduce_mod1(-s)) > 1e-7)
                throw NormalFormError(std::string(who) + ": s-component is not -s");
            double shift = reduce_mod1(img.t() - t0);
            if (t0 == 0.17)
                raw[k] = shift;
            else if (circle_dist(shift, raw[k]) > 1e-7)
                throw NormalFormError(std::string(who) + ": fiber shift depends on t");
        }
    }
    a[0] = raw[0];
    for (int k = 1; k <= S; ++k) a[k] = a[k - 1] + circ_diff(raw[k], raw[k - 1]);
    double w = a[S] - a[0];
    int wi = static_cast<int>(std::lround(w));
    if (std::fabs(w - wi) > 0.25 || wi < 0 || wi > 1)
        throw NormalFormError(std::string(who) + ": fiber shift winding " +
                              std::to_string(w) + " is not 0 or 1");
    if (winding_out) *winding_out = wi;
    return a;
}

double table_eval(const std::vector<double>& tab, double s) {
    const int S = static_cast<int>(tab.size()) - 1;
    double fs = reduce_mod1(s) * S;
    int lo = std::min(static_cast<int>(std::floor(fs)), S - 1);
    double fr = fs - lo;
    return tab[lo] + fr * (tab[lo + 1] - tab[lo]);
}

}  // namespace

ConjugacyMap reversing_normalization(const SurfaceMap& f, int type, int s_samples) {
    if (f.surface() != Surface::Torus)
        throw Error("reversing_normalization: torus maps only");
    if (type != 1 && type != 2) throw Error("reversing_normalization: type must be 1 or 2");
    const int S = s_samples;
    int winding = 0;
    std::vector<double> a = tabulate_fiber_shift(f, S, "reversing_normalization", &winding);

    auto a_at = [&](double s) { return table_eval(a, s); };
    double gap = reduce_mod1(a_at(0.0) - a_at(0.5));
    double d0 = std::min(gap, 1.0 - gap);
    double dhalf = std::fabs(gap - 0.5);
    const double tol_case = 1e-4;
    int detected = d0 < tol_case ? 1 : (dhalf < tol_case ? 2 : 0);
    if (detected == 0)
        throw ContinuityGapAtHalf("reversing_normalization: a(0)-a(1/2) = " +
                                  std::to_string(gap) + " is neither 0 nor 1/2");
    if (detected != type || winding != type - 1)
        throw ContinuityGapAtHalf("reversing_normalization: requested type " +
                                  std::to_string(type) + " but the gap indicates type " +
                                  std::to_string(detected));
    const double alpha = reduce_mod1(a_at(0.0));

    // fiber correction: zero (type 1) or s (type 2) on the front half,
    // a(0) - a(s) on the back half
    std::vector<double> beta(S + 1);
    for (int k = 0; k <= S; ++k) {
        double s = double(k) / S;
        if (s <= 0.5)
            beta[k] = type == 1 ? 0.0 : s;
        else
            beta[k] = a_at(0.0) - a_at(s);
    }

    auto beta_at = [&](double s) {
        s = reduce_mod1(s);
        double fs = s * S;
        int lo = std::min(static_cast<int>(std::floor(fs)), S - 1);
        double fr = fs - lo;
        return beta[lo] + fr * circ_diff(beta[lo + 1], beta[lo]);
    };

    ConjugacyMap B;
    B.model = type == 1 ? ConjugacyMap::Model::TorusReversingType1
                        : ConjugacyMap::Model::TorusReversingType2;
    B.model_param = Vec2{alpha, 0.0};
    B.rows = 64;
    B.cols = 64;
    B.target_surface = Surface::Torus;
    B.beta = beta;
    B.values.resize(std::size_t(B.rows) * B.cols);
    for (int i = 0; i < B.rows; ++i)
        for (int j = 0; j < B.cols; ++j) {
            double s = double(i) / B.rows, t = double(j) / B.cols;
            B.values[std::size_t(i) * B.cols + j] = torus_point(s, t + beta_at(s));
        }

    // exact-form verification of B^-1 f B against the rigid model
    double res = 0.0;
    for (int i = 0; i < 257; ++i) {
        double s = i / 257.0;
        for (double t : {0.11, 0.63}) {
            SurfacePoint w = torus_point(s, t + beta_at(s));
            SurfacePoint fw = f.forward(w);
            SurfacePoint back = torus_point(fw.s(), fw.t() - beta_at(fw.s()));
            double model_t = type == 1 ? t + alpha : t + s + alpha;
            SurfacePoint want = torus_point(-s, model_t);
            res = std::max(res, surface_distance(back, want));
        }
    }
    B.residual = res;
    return B;
}

KleinNormalization klein_normalization(const SurfaceMap& f_plus, const SurfaceMap& theta,
                                       int s_samples) {
    if (f_plus.surface() != Surface::Torus || theta.surface() != Surface::Torus)
        throw Error("klein_normalization: expects torus-level lift and involution");
    const int S = s_samples;

    Rng rng(0x6b6e6f726dULL);
    for (int i = 0; i < 24; ++i) {
        SurfacePoint p = torus_point(rng.uniform(), rng.uniform());
        if (surface_distance(theta.forward(theta.forward(p)), p) > 1e-7)
            throw NormalFormError("klein_normalization: theta is not an involution");
        SurfacePoint ab = f_plus.forward(theta.forward(p));
        SurfacePoint ba = theta.forward(f_plus.forward(p));
        if (surface_distance(ab, ba) > 1e-7)
            throw ThetaCommutationFailure("klein_normalization: lift and involution do not commute");
    }

    int winding = 0;
    std::vector<double> a = tabulate_fiber_shift(theta, S, "klein_normalization", &winding);
    if (winding != 0)
        throw NormalFormError("klein_normalization: involution cocycle has nonzero winding");
    auto a_at = [&](double s) { return table_eval(a, s); };
    if (circle_dist(a_at(0.0), 0.5) > 1e-4 || circle_dist(a_at(0.5), 0.5) > 1e-4)
        throw ContinuityGapAtHalf("klein_normalization: a(0), a(1/2) must equal 1/2");

    std::vector<double> beta(S + 1);
    for (int k = 0; k <= S; ++k) {
        double s = double(k) / S;
        beta[k] = s <= 0.5 ? 0.0 : 0.5 - a_at(s);
    }
    auto beta_at = [&](double s) {
        s = reduce_mod1(s);
        double fs = s * S;
        int lo = std::min(static_cast<int>(std::floor(fs)), S - 1);
        double fr = fs - lo;
        return beta[lo] + fr * circ_diff(beta[lo + 1], beta[lo]);
    };

    KleinNormalization out;
    double ident = 0.0;
    for (int k = 0; k <= S; ++k) {
        double s = double(k) / S;
        double lhs = a_at(s) + beta_at(s) - beta_at(-s);
        ident = std::max(ident, circle_dist(lhs, 0.5));
    }
    out.identity_error = ident;

    // commutation of the corrected coordinates with the standard involution
    double theta_res = 0.0;
    for (int i = 0; i < 129; ++i) {
        double s = i / 129.0;
        for (double t : {0.21, 0.74}) {
            SurfacePoint Bp = torus_point(s, t + beta_at(s));
            SurfacePoint lhs = theta.forward(Bp);
            Vec2 st0 = klein_involution(Vec2{s, t});
            SurfacePoint rhs = torus_point(st0[0], st0[1] + beta_at(st0[0]));
            theta_res = std::max(theta_res, surface_distance(lhs, rhs));
        }
    }
    out.theta_residual = theta_res;
    if (theta_res > 1e-3)
        throw ThetaCommutationFailure("klein_normalization: corrected involution residual " +
                                      std::to_string(theta_res));

    // normalized lift: constant fiber shift over either s or s + 1/2
    SurfacePoint probe = f_plus.forward(torus_point(0.31, 0.0));
    double c = circle_dist(probe.s(), 0.31) < 0.25 ? 0.0 : 0.5;
    double res = 0.0;
    double alpha_acc_sin = 0.0, alpha_acc_cos = 0.0;
    std::vector<double> tshift(129);
    for (int i = 0; i < 129; ++i) {
        double s = i / 129.0;
        SurfacePoint w = torus_point(s, 0.4 + beta_at(s));
        SurfacePoint fw = f_plus.forward(w);
        double snew = reduce_mod1(s + c);
        if (circle_dist(fw.s(), snew) > 1e-6)
            throw NormalFormError("klein_normalization: lift s-shift is not constant");
        double tn = reduce_mod1(fw.t() - beta_at(fw.s()) - 0.4);
        tshift[i] = tn;
        alpha_acc_sin += std::sin(2 * M_PI * tn);
        alpha_acc_cos += std::cos(2 * M_PI * tn);
    }
    double alpha = reduce_mod1(std::atan2(alpha_acc_sin, alpha_acc_cos) / (2 * M_PI));
    for (double tn : tshift) res = std::max(res, circle_dist(tn, alpha));

    out.psi_form = c > 0.25;
    out.alpha = alpha;

    ConjugacyMap B;
    B.model = out.psi_form ? ConjugacyMap::Model::KleinPsi : ConjugacyMap::Model::KleinPhi;
    B.model_param = Vec2{alpha, 0.0};
    B.rows = 64;
    B.cols = 64;
    B.target_surface = Surface::Torus;
    B.beta = beta;
    B.values.resize(std::size_t(B.rows) * B.cols);
    for (int i = 0; i < B.rows; ++i)
        for (int j = 0; j < B.cols; ++j) {
            double s = double(i) / B.rows, t = double(j) / B.cols;
            B.values[std::size_t(i) * B.cols + j] = torus_point(s, t + beta_at(s));
        }
    B.residual = res;
    out.B = std::move(B);
    return out;
}

}  // namespace kere
