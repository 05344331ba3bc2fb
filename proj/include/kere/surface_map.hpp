#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kere/surface.hpp"

namespace kere {

enum class Orientation { Preserving, Reversing };

/// Integer 2x2 matrix acting on the deck lattice of torus/Klein lifts.
struct Mat2i {
    int m[2][2] = {{1, 0}, {0, 1}};

    int det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
    bool operator==(const Mat2i& o) const {
        return m[0][0] == o.m[0][0] && m[0][1] == o.m[0][1] && m[1][0] == o.m[1][0] &&
               m[1][1] == o.m[1][1];
    }
    Mat2i operator*(const Mat2i& o) const {
        Mat2i r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                r.m[i][j] = m[i][0] * o.m[0][j] + m[i][1] * o.m[1][j];
        return r;
    }
    Vec2 apply(Vec2 v) const {
        return Vec2{m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
    }
    Mat2i inverse() const;  // requires det = +-1
    static Mat2i identity() { return Mat2i{}; }
};

enum class MapKind {
    Identity,
    Mobius,
    FractionalReflection,
    RotationProfile,
    RadialWarp,
    TorusTranslation,
    TorusReversingType1,
    TorusReversingType2,
    TorusLinear,
    TorusWarpS,
    TorusWarpT,
    KleinLift,
    AnnulusRotation,
    AnnulusReversing,
    AnnulusWarp,
    MobiusStripLift,
    DoubledAnnulus,
    Inverted,
    Composite,
};

std::string to_string(MapKind k);

/// An invertible self-map of one of the surfaces. Values are immutable
/// after construction; evaluation is pure, so instances can be shared
/// freely between threads.
class SurfaceMap {
public:
    Surface surface() const { return surface_; }
    MapKind kind() const { return kind_; }
    Orientation orientation() const { return orientation_; }
    bool has_lift() const { return lift_available_; }
    const std::vector<double>& params() const { return params_; }
    const std::vector<SurfaceMap>& chain() const { return chain_; }

    SurfacePoint forward(const SurfacePoint& x) const;
    SurfacePoint inverse(const SurfacePoint& x) const;
    SurfacePoint iterate(const SurfacePoint& x, long n) const;

    /// Lift to the universal-cover plane (torus/Klein families and their
    /// warps; doubles of annulus maps). Satisfies
    /// lift(x + v) = lift(x) + A v for integer v.
    Vec2 lift_forward(Vec2 xy) const;
    Vec2 lift_inverse(Vec2 xy) const;

    SurfaceMap inverted() const;

    // builtin families
    static SurfaceMap identity(Surface s);
    static SurfaceMap mobius(Complex a, Complex b, Complex c, Complex d);
    static SurfaceMap fractional_reflection(Complex a, Complex b, Complex c, Complex d);
    /// Sphere map rotating the plane circle of radius r by angle(r); the
    /// profile is piecewise linear through `knots` (r, angle), extended
    /// with the end slopes. Fixes the chart origin and infinity.
    static SurfaceMap rotation_profile(std::vector<std::pair<double, double>> knots);
    /// Radial distortion (r,theta) -> (r + amp r(1-r) sin theta, theta)
    /// inside the unit chart disc, identity outside. |amp| < 0.5.
    static SurfaceMap radial_warp(double amp);
    static SurfaceMap torus_translation(double alpha, double beta);
    static SurfaceMap torus_reversing_type1(double alpha);  // (s,t) -> (-s, t+a)
    static SurfaceMap torus_reversing_type2(double alpha);  // (s,t) -> (-s, t+s+a)
    static SurfaceMap torus_linear(Mat2i A);
    static SurfaceMap torus_warp_s(double amp, double phase = 0.0, double freq = 1.0);
    static SurfaceMap torus_warp_t(double amp, double phase = 0.0, double freq = 1.0);
    /// Klein-bottle map given by a torus lift commuting with the covering
    /// involution (s,t) -> (-s, t+1/2); commutation is checked numerically.
    static SurfaceMap klein_lift(SurfaceMap torus_map);
    static SurfaceMap klein_phi(double alpha);
    static SurfaceMap klein_psi(double alpha);
    static SurfaceMap klein_warp(double amp);  // t += amp cos(2pi s), commutes with the involution
    static SurfaceMap annulus_rotation(double alpha);
    static SurfaceMap annulus_reversing(double alpha);
    static SurfaceMap annulus_warp(double amp);  // t += amp cos(pi s), boundary friendly
    static SurfaceMap mobius_strip_lift(SurfaceMap annulus_map);
    static SurfaceMap mobius_strip_rotation(double alpha);
    /// Double of an annulus map on the torus obtained by gluing two copies
    /// along both boundary circles.
    static SurfaceMap double_to_torus(SurfaceMap annulus_map);
    /// Double of a Mobius-strip map on the Klein bottle.
    static SurfaceMap double_to_klein(SurfaceMap strip_map);
    static SurfaceMap compose(std::vector<SurfaceMap> chain_applied_in_order);

    /// w o f o w^-1 on w's surface.
    static SurfaceMap conjugate(const SurfaceMap& w, const SurfaceMap& f);

private:
    SurfaceMap() = default;

    Surface surface_ = Surface::Plane;
    MapKind kind_ = MapKind::Identity;
    Orientation orientation_ = Orientation::Preserving;
    bool lift_available_ = false;
    std::vector<double> params_;
    std::vector<SurfaceMap> chain_;
};

/// Lattice action of the lift, measured as lift(x+e_i) - lift(x) and
/// rounded to integers. Throws NonIntegerHolonomy when the rounding
/// residual exceeds 1e-3.
Mat2i homology_matrix_of(const SurfaceMap& f);

/// Sign of the chart Jacobian at x via central differences (h = 1e-5).
/// +1 preserving, -1 reversing.
int jacobian_sign(const SurfaceMap& f, const SurfacePoint& x, double h = 1e-5);

}  // namespace kere
