#pragma once

#include <array>
#include <complex>
#include <string>

#include "kere/errors.hpp"
#include "kere/rng.hpp"

namespace kere {

using Complex = std::complex<double>;
using Vec2 = std::array<double, 2>;

enum class Surface { Sphere, Torus, Klein, Annulus, MobiusStrip, Plane };

std::string to_string(Surface s);
Surface surface_from_string(const std::string& s);

/// A point of one of the supported surfaces in its chart:
///   sphere       unit vector in R^3
///   torus/Klein  (s, t) in [0,1)^2, Klein reduced to the canonical
///                representative under (s,t) ~ (-s, t+1/2)
///   annulus      (s, t) in [-1,1] x [0,1)
///   Mobius strip annulus chart reduced under (s,t) ~ (-s, t+1/2)
///   plane        (x, y)
struct SurfacePoint {
    Surface surface = Surface::Plane;
    std::array<double, 3> c{0.0, 0.0, 0.0};

    double x() const { return c[0]; }
    double y() const { return c[1]; }
    double z() const { return c[2]; }
    double s() const { return c[0]; }
    double t() const { return c[1]; }
};

double reduce_mod1(double v);
/// Distance between a, b on the circle R/Z.
double circle_dist(double a, double b);

SurfacePoint sphere_point(double x, double y, double z);
SurfacePoint torus_point(double s, double t);
SurfacePoint klein_point(double s, double t);
SurfacePoint annulus_point(double s, double t);
SurfacePoint mobius_strip_point(double s, double t);
SurfacePoint plane_point(double x, double y);
SurfacePoint make_point(Surface surf, double a, double b, double c = 0.0);

SurfacePoint north_pole();
SurfacePoint south_pole();

/// Deck transformation (s,t) -> (-s, t + 1/2) on torus coordinates; the
/// Klein bottle is the quotient of the torus by this involution.
Vec2 klein_involution(Vec2 st);
Vec2 klein_canonical(Vec2 st);
/// Same involution in the annulus chart; quotient is the Mobius strip.
Vec2 strip_involution(Vec2 st);
Vec2 strip_canonical(Vec2 st);

/// Homogeneous coordinates (z1 : z2) with z = z1/z2 the stereographic
/// coordinate from the north pole; the north pole itself is (1 : 0).
std::pair<Complex, Complex> sphere_to_homogeneous(const SurfacePoint& p);
SurfacePoint sphere_from_homogeneous(Complex z1, Complex z2);
/// Finite-chart value z1/z2; infinite when z2 == 0.
Complex sphere_to_plane(const SurfacePoint& p, bool* at_infinity = nullptr);
SurfacePoint sphere_from_plane(Complex z);

/// The metric of each chart: great-circle on the sphere, flat quotient
/// metrics elsewhere, Euclidean on the plane.
double surface_distance(const SurfacePoint& a, const SurfacePoint& b);

/// A point at distance <= dist from x, uniformly random direction.
/// At the annulus boundary the offset is clamped into the chart.
SurfacePoint random_nearby(const SurfacePoint& x, double dist, Rng& rng);

/// Uniform-ish random point of the surface (exactly uniform on sphere,
/// torus, Klein; chart-uniform elsewhere).
SurfacePoint random_point(Surface surf, Rng& rng);

/// Orthonormal tangent frame at a sphere point.
std::pair<std::array<double, 3>, std::array<double, 3>> sphere_tangent_frame(
    const SurfacePoint& p);

/// Chart displacement of `to` relative to `from`, minimized over the deck
/// orbit on quotient surfaces; tangent-frame coordinates on the sphere
/// (small-displacement use only there).
Vec2 chart_delta(const SurfacePoint& from, const SurfacePoint& to);

/// Inverse of chart_delta for small displacements: the point at chart
/// offset d from x.
SurfacePoint chart_shift(const SurfacePoint& x, Vec2 d);

void require_surface(const SurfacePoint& p, Surface expected, const char* where);

}  // namespace kere
