#include "kere/surface.hpp"

#include <cmath>

namespace kere {

std::string to_string(Surface s) {
    switch (s) {
        case Surface::Sphere: return "sphere";
        case Surface::Torus: return "torus";
        case Surface::Klein: return "klein";
        case Surface::Annulus: return "annulus";
        case Surface::MobiusStrip: return "mobius";
        case Surface::Plane: return "plane";
    }
    return "?";
}

Surface surface_from_string(const std::string& s) {
    if (s == "sphere") return Surface::Sphere;
    if (s == "torus") return Surface::Torus;
    if (s == "klein") return Surface::Klein;
    if (s == "annulus") return Surface::Annulus;
    if (s == "mobius") return Surface::MobiusStrip;
    if (s == "plane") return Surface::Plane;
    throw ConfigError("unknown surface '" + s + "'");
}

double reduce_mod1(double v) {
    double r = v - std::floor(v);
    if (r >= 1.0) r -= 1.0;  // floor rounding at the seam
    return r;
}

double circle_dist(double a, double b) {
    double d = std::fabs(reduce_mod1(a - b));
    return d > 0.5 ? 1.0 - d : d;
}

SurfacePoint sphere_point(double x, double y, double z) {
    double n = std::sqrt(x * x + y * y + z * z);
    if (n < 1e-300) throw Error("sphere_point: zero vector");
    return SurfacePoint{Surface::Sphere, {x / n, y / n, z / n}};
}

SurfacePoint torus_point(double s, double t) {
    return SurfacePoint{Surface::Torus, {reduce_mod1(s), reduce_mod1(t), 0.0}};
}

Vec2 klein_involution(Vec2 st) {
    return Vec2{reduce_mod1(-st[0]), reduce_mod1(st[1] + 0.5)};
}

Vec2 klein_canonical(Vec2 st) {
    double s = reduce_mod1(st[0]);
    double t = reduce_mod1(st[1]);
    if (s > 0.5) {
        s = 1.0 - s;
        t = reduce_mod1(t + 0.5);
    }
    // on the two invariant circles the involution acts on t alone
    if (s == 0.0 || s == 0.5) {
        if (t >= 0.5) t -= 0.5;
    }
    return Vec2{s, t};
}

SurfacePoint klein_point(double s, double t) {
    Vec2 k = klein_canonical(Vec2{s, t});
    return SurfacePoint{Surface::Klein, {k[0], k[1], 0.0}};
}

SurfacePoint annulus_point(double s, double t) {
    if (s < -1.0 - 1e-9 || s > 1.0 + 1e-9)
        throw Error("annulus_point: s out of [-1,1]");
    s = std::clamp(s, -1.0, 1.0);
    return SurfacePoint{Surface::Annulus, {s, reduce_mod1(t), 0.0}};
}

Vec2 strip_involution(Vec2 st) {
    return Vec2{-st[0], reduce_mod1(st[1] + 0.5)};
}

Vec2 strip_canonical(Vec2 st) {
    double s = st[0];
    double t = reduce_mod1(st[1]);
    if (s < 0.0) {
        s = -s;
        t = reduce_mod1(t + 0.5);
    }
    if (s == 0.0 && t >= 0.5) t -= 0.5;
    return Vec2{s, t};
}

SurfacePoint mobius_strip_point(double s, double t) {
    if (s < -1.0 - 1e-9 || s > 1.0 + 1e-9)
        throw Error("mobius_strip_point: s out of [-1,1]");
    Vec2 k = strip_canonical(Vec2{std::clamp(s, -1.0, 1.0), t});
    return SurfacePoint{Surface::MobiusStrip, {k[0], k[1], 0.0}};
}

SurfacePoint plane_point(double x, double y) {
    return SurfacePoint{Surface::Plane, {x, y, 0.0}};
}

SurfacePoint make_point(Surface surf, double a, double b, double c) {
    switch (surf) {
        case Surface::Sphere: return sphere_point(a, b, c);
        case Surface::Torus: return torus_point(a, b);
        case Surface::Klein: return klein_point(a, b);
        case Surface::Annulus: return annulus_point(a, b);
        case Surface::MobiusStrip: return mobius_strip_point(a, b);
        case Surface::Plane: return plane_point(a, b);
    }
    throw Error("make_point: bad surface");
}

SurfacePoint north_pole() { return SurfacePoint{Surface::Sphere, {0.0, 0.0, 1.0}}; }
SurfacePoint south_pole() { return SurfacePoint{Surface::Sphere, {0.0, 0.0, -1.0}}; }

std::pair<Complex, Complex> sphere_to_homogeneous(const SurfacePoint& p) {
    // two algebraically equal charts; pick the numerically stable one
    if (p.z() <= 0.0) return {Complex(p.x(), p.y()), Complex(1.0 - p.z(), 0.0)};
    return {Complex(1.0 + p.z(), 0.0), Complex(p.x(), -p.y())};
}

SurfacePoint sphere_from_homogeneous(Complex z1, Complex z2) {
    double n1 = std::norm(z1), n2 = std::norm(z2);
    double d = n1 + n2;
    if (!(d > 0.0) || !std::isfinite(d)) throw Error("sphere_from_homogeneous: bad coords");
    Complex w = 2.0 * z1 * std::conj(z2);
    return SurfacePoint{Surface::Sphere, {w.real() / d, w.imag() / d, (n1 - n2) / d}};
}

Complex sphere_to_plane(const SurfacePoint& p, bool* at_infinity) {
    auto [z1, z2] = sphere_to_homogeneous(p);
    if (std::abs(z2) == 0.0) {
        if (at_infinity) *at_infinity = true;
        return Complex(0.0, 0.0);
    }
    if (at_infinity) *at_infinity = false;
    return z1 / z2;
}

SurfacePoint sphere_from_plane(Complex z) {
    return sphere_from_homogeneous(z, Complex(1.0, 0.0));
}

void require_surface(const SurfacePoint& p, Surface expected, const char* where) {
    if (p.surface != expected)
        throw SurfaceMismatch(std::string(where) + ": expected " + to_string(expected) +
                              ", got " + to_string(p.surface));
}

namespace {

double sphere_dist(const SurfacePoint& a, const SurfacePoint& b) {
    double cx = a.y() * b.z() - a.z() * b.y();
    double cy = a.z() * b.x() - a.x() * b.z();
    double cz = a.x() * b.y() - a.y() * b.x();
    double cross = std::sqrt(cx * cx + cy * cy + cz * cz);
    double dot = a.x() * b.x() + a.y() * b.y() + a.z() * b.z();
    return std::atan2(cross, dot);
}

double torus_dist(Vec2 a, Vec2 b) {
    double ds = circle_dist(a[0], b[0]);
    double dt = circle_dist(a[1], b[1]);
    return std::hypot(ds, dt);
}

double annulus_dist(Vec2 a, Vec2 b) {
    return std::hypot(a[0] - b[0], circle_dist(a[1], b[1]));
}

}  // namespace

double surface_distance(const SurfacePoint& a, const SurfacePoint& b) {
    if (a.surface != b.surface)
        throw SurfaceMismatch("surface_distance: " + to_string(a.surface) + " vs " +
                              to_string(b.surface));
    switch (a.surface) {
        case Surface::Sphere:
            return sphere_dist(a, b);
        case Surface::Torus:
            return torus_dist(Vec2{a.s(), a.t()}, Vec2{b.s(), b.t()});
        case Surface::Klein: {
            Vec2 pa{a.s(), a.t()}, pb{b.s(), b.t()};
            return std::min(torus_dist(pa, pb), torus_dist(pa, klein_involution(pb)));
        }
        case Surface::Annulus:
            return annulus_dist(Vec2{a.s(), a.t()}, Vec2{b.s(), b.t()});
        case Surface::MobiusStrip: {
            Vec2 pa{a.s(), a.t()}, pb{b.s(), b.t()};
            return std::min(annulus_dist(pa, pb), annulus_dist(pa, strip_involution(pb)));
        }
        case Surface::Plane:
            return std::hypot(a.x() - b.x(), a.y() - b.y());
    }
    throw Error("surface_distance: bad surface");
}

std::pair<std::array<double, 3>, std::array<double, 3>> sphere_tangent_frame(
    const SurfacePoint& p) {
    std::array<double, 3> up{0.0, 0.0, 1.0};
    if (std::fabs(p.z()) > 0.9) up = {1.0, 0.0, 0.0};
    // e1 = normalize(up x p), e2 = p x e1
    std::array<double, 3> e1{up[1] * p.z() - up[2] * p.y(),
                             up[2] * p.x() - up[0] * p.z(),
                             up[0] * p.y() - up[1] * p.x()};
    double n = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
    for (auto& v : e1) v /= n;
    std::array<double, 3> e2{p.y() * e1[2] - p.z() * e1[1],
                             p.z() * e1[0] - p.x() * e1[2],
                             p.x() * e1[1] - p.y() * e1[0]};
    return {e1, e2};
}

Vec2 chart_delta(const SurfacePoint& from, const SurfacePoint& to) {
    if (from.surface != to.surface) throw SurfaceMismatch("chart_delta");
    switch (from.surface) {
        case Surface::Plane:
            return Vec2{to.x() - from.x(), to.y() - from.y()};
        case Surface::Annulus: {
            double dt = to.t() - from.t();
            return Vec2{to.s() - from.s(), dt - std::round(dt)};
        }
        case Surface::Torus: {
            double ds = to.s() - from.s(), dt = to.t() - from.t();
            return Vec2{ds - std::round(ds), dt - std::round(dt)};
        }
        case Surface::Klein: {
            Vec2 reps[2] = {Vec2{to.s(), to.t()}, klein_involution(Vec2{to.s(), to.t()})};
            Vec2 best{0, 0};
            double bn = 1e300;
            for (const auto& r : reps) {
                double ds = r[0] - from.s(), dt = r[1] - from.t();
                ds -= std::round(ds);
                dt -= std::round(dt);
                double n = ds * ds + dt * dt;
                if (n < bn) {
                    bn = n;
                    best = Vec2{ds, dt};
                }
            }
            return best;
        }
        case Surface::MobiusStrip: {
            Vec2 reps[2] = {Vec2{to.s(), to.t()}, strip_involution(Vec2{to.s(), to.t()})};
            Vec2 best{0, 0};
            double bn = 1e300;
            for (const auto& r : reps) {
                double ds = r[0] - from.s(), dt = r[1] - from.t();
                dt -= std::round(dt);
                double n = ds * ds + dt * dt;
                if (n < bn) {
                    bn = n;
                    best = Vec2{ds, dt};
                }
            }
            return best;
        }
        case Surface::Sphere: {
            auto [e1, e2] = sphere_tangent_frame(from);
            double u = (to.x() - from.x()) * e1[0] + (to.y() - from.y()) * e1[1] +
                       (to.z() - from.z()) * e1[2];
            double v = (to.x() - from.x()) * e2[0] + (to.y() - from.y()) * e2[1] +
                       (to.z() - from.z()) * e2[2];
            return Vec2{u, v};
        }
    }
    throw Error("chart_delta: bad surface");
}

SurfacePoint chart_shift(const SurfacePoint& x, Vec2 d) {
    switch (x.surface) {
        case Surface::Plane:
            return plane_point(x.x() + d[0], x.y() + d[1]);
        case Surface::Torus:
            return torus_point(x.s() + d[0], x.t() + d[1]);
        case Surface::Klein:
            return klein_point(x.s() + d[0], x.t() + d[1]);
        case Surface::Annulus:
            return annulus_point(std::clamp(x.s() + d[0], -1.0, 1.0), x.t() + d[1]);
        case Surface::MobiusStrip:
            return mobius_strip_point(std::clamp(x.s() + d[0], -1.0, 1.0), x.t() + d[1]);
        case Surface::Sphere: {
            auto [e1, e2] = sphere_tangent_frame(x);
            return sphere_point(x.x() + d[0] * e1[0] + d[1] * e2[0],
                                x.y() + d[0] * e1[1] + d[1] * e2[1],
                                x.z() + d[0] * e1[2] + d[1] * e2[2]);
        }
    }
    throw Error("chart_shift: bad surface");
}

SurfacePoint random_nearby(const SurfacePoint& x, double dist, Rng& rng) {
    double r = dist * (0.05 + 0.95 * rng.uniform());
    double psi = rng.angle();
    switch (x.surface) {
        case Surface::Sphere: {
            auto [e1, e2] = sphere_tangent_frame(x);
            double c = std::cos(r), s = std::sin(r);
            double dx = std::cos(psi), dy = std::sin(psi);
            return sphere_point(c * x.x() + s * (dx * e1[0] + dy * e2[0]),
                                c * x.y() + s * (dx * e1[1] + dy * e2[1]),
                                c * x.z() + s * (dx * e1[2] + dy * e2[2]));
        }
        case Surface::Torus:
            return torus_point(x.s() + r * std::cos(psi), x.t() + r * std::sin(psi));
        case Surface::Klein:
            return klein_point(x.s() + r * std::cos(psi), x.t() + r * std::sin(psi));
        case Surface::Annulus: {
            double s = std::clamp(x.s() + r * std::cos(psi), -1.0, 1.0);
            return annulus_point(s, x.t() + r * std::sin(psi));
        }
        case Surface::MobiusStrip: {
            double s = std::clamp(x.s() + r * std::cos(psi), -1.0, 1.0);
            return mobius_strip_point(s, x.t() + r * std::sin(psi));
        }
        case Surface::Plane:
            return plane_point(x.x() + r * std::cos(psi), x.y() + r * std::sin(psi));
    }
    throw Error("random_nearby: bad surface");
}

SurfacePoint random_point(Surface surf, Rng& rng) {
    switch (surf) {
        case Surface::Sphere: {
            double z = rng.uniform(-1.0, 1.0);
            double phi = rng.angle();
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            return sphere_point(r * std::cos(phi), r * std::sin(phi), z);
        }
        case Surface::Torus:
            return torus_point(rng.uniform(), rng.uniform());
        case Surface::Klein:
            return klein_point(rng.uniform() * 0.5, rng.uniform());
        case Surface::Annulus:
            return annulus_point(rng.uniform(-1.0, 1.0), rng.uniform());
        case Surface::MobiusStrip:
            return mobius_strip_point(rng.uniform(), rng.uniform());
        case Surface::Plane:
            return plane_point(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    }
    throw Error("random_point: bad surface");
}

}  // namespace kere
