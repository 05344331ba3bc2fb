#include "kere/surface_map.hpp"

#include <cmath>

namespace kere {

Mat2i Mat2i::inverse() const {
    int d = det();
    if (d != 1 && d != -1) throw Error("Mat2i::inverse: determinant not +-1");
    Mat2i r;
    r.m[0][0] = m[1][1] * d;
    r.m[0][1] = -m[0][1] * d;
    r.m[1][0] = -m[1][0] * d;
    r.m[1][1] = m[0][0] * d;
    return r;
}

std::string to_string(MapKind k) {
    switch (k) {
        case MapKind::Identity: return "identity";
        case MapKind::Mobius: return "mobius";
        case MapKind::FractionalReflection: return "fractional_reflection";
        case MapKind::RotationProfile: return "rotation_profile";
        case MapKind::RadialWarp: return "radial_warp";
        case MapKind::TorusTranslation: return "translation";
        case MapKind::TorusReversingType1: return "reversing_type1";
        case MapKind::TorusReversingType2: return "reversing_type2";
        case MapKind::TorusLinear: return "linear";
        case MapKind::TorusWarpS: return "warp_s";
        case MapKind::TorusWarpT: return "warp_t";
        case MapKind::KleinLift: return "klein_lift";
        case MapKind::AnnulusRotation: return "annulus_rotation";
        case MapKind::AnnulusReversing: return "annulus_reversing";
        case MapKind::AnnulusWarp: return "annulus_warp";
        case MapKind::MobiusStripLift: return "mobius_strip_lift";
        case MapKind::DoubledAnnulus: return "double";
        case MapKind::Inverted: return "inverted";
        case MapKind::Composite: return "composite";
    }
    return "?";
}

namespace {

struct Homog {
    Complex z1, z2;
    void normalize() {
        double m = std::max(std::abs(z1), std::abs(z2));
        if (m > 0.0 && (m > 1e100 || m < 1e-100)) {
            z1 /= m;
            z2 /= m;
        }
    }
};

Homog homog_of(const SurfacePoint& p) {
    auto [z1, z2] = sphere_to_homogeneous(p);
    return Homog{z1, z2};
}

SurfacePoint apply_mobius_coeffs(const SurfacePoint& p, const double* q, bool conjugate_first) {
    Complex a(q[0], q[1]), b(q[2], q[3]), c(q[4], q[5]), d(q[6], q[7]);
    Homog h = homog_of(p);
    if (conjugate_first) {
        h.z1 = std::conj(h.z1);
        h.z2 = std::conj(h.z2);
    }
    Homog r{a * h.z1 + b * h.z2, c * h.z1 + d * h.z2};
    r.normalize();
    return sphere_from_homogeneous(r.z1, r.z2);
}

// piecewise-linear profile through (r_i, phi_i), end slopes extended
double eval_profile(const std::vector<double>& knots, double r) {
    const std::size_t n = knots.size() / 2;
    auto rk = [&](std::size_t i) { return knots[2 * i]; };
    auto pk = [&](std::size_t i) { return knots[2 * i + 1]; };
    if (n == 1) return pk(0);
    if (r <= rk(0)) {
        double sl = (pk(1) - pk(0)) / (rk(1) - rk(0));
        return pk(0) + sl * (r - rk(0));
    }
    if (r >= rk(n - 1)) {
        double sl = (pk(n - 1) - pk(n - 2)) / (rk(n - 1) - rk(n - 2));
        return pk(n - 1) + sl * (r - rk(n - 1));
    }
    std::size_t lo = 0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (r >= rk(i)) lo = i;
    double u = (r - rk(lo)) / (rk(lo + 1) - rk(lo));
    return pk(lo) + u * (pk(lo + 1) - pk(lo));
}

SurfacePoint apply_rotation_profile(const SurfacePoint& p, const std::vector<double>& knots,
                                    int dir) {
    Homog h = homog_of(p);
    if (std::abs(h.z2) == 0.0 || std::abs(h.z1) == 0.0) return p;  // both poles fixed
    double r = std::abs(h.z1) / std::abs(h.z2);
    double ang = dir * eval_profile(knots, r);
    h.z1 *= Complex(std::cos(ang), std::sin(ang));
    return sphere_from_homogeneous(h.z1, h.z2);
}

SurfacePoint apply_radial_warp(const SurfacePoint& p, double amp, bool forward) {
    Homog h = homog_of(p);
    double m1 = std::abs(h.z1), m2 = std::abs(h.z2);
    if (m2 == 0.0 || m1 >= m2 || m1 == 0.0) return p;  // identity outside the unit disc
    Complex z = h.z1 / h.z2;
    double r = std::abs(z);
    double sin_th = z.imag() / r;
    double k = amp * sin_th;
    double rn;
    if (forward) {
        rn = r + k * r * (1.0 - r);
    } else {
        if (std::fabs(k) < 1e-14) {
            rn = r;
        } else {
            double disc = (1.0 + k) * (1.0 + k) - 4.0 * k * r;
            rn = 2.0 * r / ((1.0 + k) + std::sqrt(disc));
        }
    }
    return sphere_from_plane(z * (rn / r));
}

// double-cover chart between the annulus [-1,1] x S^1 and the torus:
// u in [0,1/2] is the front copy, u in [1/2,1] the back copy
struct DoubleChart {
    static std::pair<double, int> torus_to_annulus(double u) {
        u = reduce_mod1(u);
        if (u <= 0.5) return {4.0 * u - 1.0, 0};
        return {3.0 - 4.0 * u, 1};
    }
    static double annulus_to_torus(double s, int copy) {
        double u = (s + 1.0) / 4.0;
        return copy == 0 ? u : reduce_mod1(1.0 - u);
    }
};

int leaf_count(const SurfaceMap& f) {
    if (f.chain().empty()) return 1;
    int n = 0;
    for (const auto& g : f.chain()) n += leaf_count(g);
    return n;
}

}  // namespace

SurfacePoint SurfaceMap::forward(const SurfacePoint& x) const {
    require_surface(x, surface_, "SurfaceMap::forward");
    switch (kind_) {
        case MapKind::Identity:
            return x;
        case MapKind::Mobius:
            return apply_mobius_coeffs(x, params_.data(), false);
        case MapKind::FractionalReflection:
            return apply_mobius_coeffs(x, params_.data(), true);
        case MapKind::RotationProfile:
            return apply_rotation_profile(x, params_, +1);
        case MapKind::RadialWarp:
            return apply_radial_warp(x, params_[0], true);
        case MapKind::TorusTranslation:
            return torus_point(x.s() + params_[0], x.t() + params_[1]);
        case MapKind::TorusReversingType1:
            return torus_point(-x.s(), x.t() + params_[0]);
        case MapKind::TorusReversingType2:
            return torus_point(-x.s(), x.t() + x.s() + params_[0]);
        case MapKind::TorusLinear: {
            double a = params_[0], b = params_[1], c = params_[2], d = params_[3];
            return torus_point(a * x.s() + b * x.t(), c * x.s() + d * x.t());
        }
        case MapKind::TorusWarpS:
            return torus_point(
                x.s() + params_[0] * std::sin(2.0 * M_PI * params_[2] * x.t() + params_[1]),
                x.t());
        case MapKind::TorusWarpT:
            return torus_point(
                x.s(),
                x.t() + params_[0] * std::sin(2.0 * M_PI * params_[2] * x.s() + params_[1]));
        case MapKind::KleinLift: {
            SurfacePoint q = chain_[0].forward(torus_point(x.s(), x.t()));
            return klein_point(q.s(), q.t());
        }
        case MapKind::AnnulusRotation:
            return annulus_point(x.s(), x.t() + params_[0]);
        case MapKind::AnnulusReversing:
            return annulus_point(-x.s(), x.t() + params_[0]);
        case MapKind::AnnulusWarp:
            return annulus_point(x.s(), x.t() + params_[0] * std::cos(M_PI * x.s()));
        case MapKind::MobiusStripLift: {
            SurfacePoint q = chain_[0].forward(annulus_point(x.s(), x.t()));
            return mobius_strip_point(q.s(), q.t());
        }
        case MapKind::DoubledAnnulus: {
            auto [s, copy] = DoubleChart::torus_to_annulus(x.s());
            SurfacePoint q = chain_[0].forward(annulus_point(s, x.t()));
            return torus_point(DoubleChart::annulus_to_torus(q.s(), copy), q.t());
        }
        case MapKind::Inverted:
            return chain_[0].inverse(x);
        case MapKind::Composite: {
            SurfacePoint p = x;
            for (const auto& g : chain_) p = g.forward(p);
            return p;
        }
    }
    throw Error("forward: bad kind");
}

SurfacePoint SurfaceMap::inverse(const SurfacePoint& x) const {
    require_surface(x, surface_, "SurfaceMap::inverse");
    switch (kind_) {
        case MapKind::Identity:
            return x;
        case MapKind::Mobius: {
            const double* q = params_.data();
            // projective inverse (d, -b; -c, a)
            double inv[8] = {q[6], q[7], -q[2], -q[3], -q[4], -q[5], q[0], q[1]};
            return apply_mobius_coeffs(x, inv, false);
        }
        case MapKind::FractionalReflection: {
            const double* q = params_.data();
            // w -> conj of (d w - b)/(-c w + a)
            double inv[8] = {q[6], -q[7], -q[2], q[3], -q[4], q[5], q[0], -q[1]};
            return apply_mobius_coeffs(x, inv, true);
        }
        case MapKind::RotationProfile:
            return apply_rotation_profile(x, params_, -1);
        case MapKind::RadialWarp:
            return apply_radial_warp(x, params_[0], false);
        case MapKind::TorusTranslation:
            return torus_point(x.s() - params_[0], x.t() - params_[1]);
        case MapKind::TorusReversingType1:
            return torus_point(-x.s(), x.t() - params_[0]);
        case MapKind::TorusReversingType2:
            return torus_point(-x.s(), x.t() + x.s() - params_[0]);
        case MapKind::TorusLinear: {
            Mat2i A;
            A.m[0][0] = static_cast<int>(params_[0]);
            A.m[0][1] = static_cast<int>(params_[1]);
            A.m[1][0] = static_cast<int>(params_[2]);
            A.m[1][1] = static_cast<int>(params_[3]);
            Mat2i B = A.inverse();
            return torus_point(B.m[0][0] * x.s() + B.m[0][1] * x.t(),
                               B.m[1][0] * x.s() + B.m[1][1] * x.t());
        }
        case MapKind::TorusWarpS:
            return torus_point(
                x.s() - params_[0] * std::sin(2.0 * M_PI * params_[2] * x.t() + params_[1]),
                x.t());
        case MapKind::TorusWarpT:
            return torus_point(
                x.s(),
                x.t() - params_[0] * std::sin(2.0 * M_PI * params_[2] * x.s() + params_[1]));
        case MapKind::KleinLift: {
            SurfacePoint q = chain_[0].inverse(torus_point(x.s(), x.t()));
            return klein_point(q.s(), q.t());
        }
        case MapKind::AnnulusRotation:
            return annulus_point(x.s(), x.t() - params_[0]);
        case MapKind::AnnulusReversing:
            return annulus_point(-x.s(), x.t() - params_[0]);
        case MapKind::AnnulusWarp:
            return annulus_point(x.s(), x.t() - params_[0] * std::cos(M_PI * x.s()));
        case MapKind::MobiusStripLift: {
            SurfacePoint q = chain_[0].inverse(annulus_point(x.s(), x.t()));
            return mobius_strip_point(q.s(), q.t());
        }
        case MapKind::DoubledAnnulus: {
            auto [s, copy] = DoubleChart::torus_to_annulus(x.s());
            SurfacePoint q = chain_[0].inverse(annulus_point(s, x.t()));
            return torus_point(DoubleChart::annulus_to_torus(q.s(), copy), q.t());
        }
        case MapKind::Inverted:
            return chain_[0].forward(x);
        case MapKind::Composite: {
            SurfacePoint p = x;
            for (auto it = chain_.rbegin(); it != chain_.rend(); ++it) p = it->inverse(p);
            return p;
        }
    }
    throw Error("inverse: bad kind");
}

SurfacePoint SurfaceMap::iterate(const SurfacePoint& x, long n) const {
    SurfacePoint p = x;
    if (n >= 0)
        for (long i = 0; i < n; ++i) p = forward(p);
    else
        for (long i = 0; i < -n; ++i) p = inverse(p);
    return p;
}

Vec2 SurfaceMap::lift_forward(Vec2 v) const {
    if (!lift_available_) throw NoLift("lift_forward: " + to_string(kind_));
    switch (kind_) {
        case MapKind::Identity:
            return v;
        case MapKind::TorusTranslation:
            return Vec2{v[0] + params_[0], v[1] + params_[1]};
        case MapKind::TorusReversingType1:
            return Vec2{-v[0], v[1] + params_[0]};
        case MapKind::TorusReversingType2:
            return Vec2{-v[0], v[1] + v[0] + params_[0]};
        case MapKind::TorusLinear:
            return Vec2{params_[0] * v[0] + params_[1] * v[1],
                        params_[2] * v[0] + params_[3] * v[1]};
        case MapKind::TorusWarpS:
            return Vec2{v[0] + params_[0] * std::sin(2.0 * M_PI * params_[2] * v[1] + params_[1]),
                        v[1]};
        case MapKind::TorusWarpT:
            return Vec2{v[0],
                        v[1] + params_[0] * std::sin(2.0 * M_PI * params_[2] * v[0] + params_[1])};
        case MapKind::KleinLift:
            return chain_[0].lift_forward(v);
        case MapKind::Inverted:
            return chain_[0].lift_inverse(v);
        case MapKind::Composite: {
            Vec2 p = v;
            for (const auto& g : chain_) p = g.lift_forward(p);
            return p;
        }
        default:
            throw NoLift("lift_forward: " + to_string(kind_));
    }
}

Vec2 SurfaceMap::lift_inverse(Vec2 v) const {
    if (!lift_available_) throw NoLift("lift_inverse: " + to_string(kind_));
    switch (kind_) {
        case MapKind::Identity:
            return v;
        case MapKind::TorusTranslation:
            return Vec2{v[0] - params_[0], v[1] - params_[1]};
        case MapKind::TorusReversingType1:
            return Vec2{-v[0], v[1] - params_[0]};
        case MapKind::TorusReversingType2:
            return Vec2{-v[0], v[1] + v[0] - params_[0]};
        case MapKind::TorusLinear: {
            Mat2i A;
            A.m[0][0] = static_cast<int>(params_[0]);
            A.m[0][1] = static_cast<int>(params_[1]);
            A.m[1][0] = static_cast<int>(params_[2]);
            A.m[1][1] = static_cast<int>(params_[3]);
            Mat2i B = A.inverse();
            return Vec2{B.m[0][0] * v[0] + B.m[0][1] * v[1],
                        B.m[1][0] * v[0] + B.m[1][1] * v[1]};
        }
        case MapKind::TorusWarpS:
            return Vec2{v[0] - params_[0] * std::sin(2.0 * M_PI * params_[2] * v[1] + params_[1]),
                        v[1]};
        case MapKind::TorusWarpT:
            return Vec2{v[0],
                        v[1] - params_[0] * std::sin(2.0 * M_PI * params_[2] * v[0] + params_[1])};
        case MapKind::KleinLift:
            return chain_[0].lift_inverse(v);
        case MapKind::Inverted:
            return chain_[0].lift_forward(v);
        case MapKind::Composite: {
            Vec2 p = v;
            for (auto it = chain_.rbegin(); it != chain_.rend(); ++it) p = it->lift_inverse(p);
            return p;
        }
        default:
            throw NoLift("lift_inverse: " + to_string(kind_));
    }
}

SurfaceMap SurfaceMap::inverted() const {
    if (kind_ == MapKind::Inverted) return chain_[0];
    SurfaceMap r;
    r.surface_ = surface_;
    r.kind_ = MapKind::Inverted;
    r.orientation_ = orientation_;
    r.lift_available_ = lift_available_;
    r.chain_ = {*this};
    return r;
}

SurfaceMap SurfaceMap::identity(Surface s) {
    SurfaceMap r;
    r.surface_ = s;
    r.kind_ = MapKind::Identity;
    r.lift_available_ = (s == Surface::Torus || s == Surface::Plane);
    return r;
}

SurfaceMap SurfaceMap::mobius(Complex a, Complex b, Complex c, Complex d) {
    double scale = std::abs(a) + std::abs(b) + std::abs(c) + std::abs(d);
    if (std::abs(a * d - b * c) < 1e-14 * scale * scale)
        throw Error("mobius: singular coefficient matrix");
    SurfaceMap r;
    r.surface_ = Surface::Sphere;
    r.kind_ = MapKind::Mobius;
    r.params_ = {a.real(), a.imag(), b.real(), b.imag(),
                 c.real(), c.imag(), d.real(), d.imag()};
    return r;
}

SurfaceMap SurfaceMap::fractional_reflection(Complex a, Complex b, Complex c, Complex d) {
    double scale = std::abs(a) + std::abs(b) + std::abs(c) + std::abs(d);
    if (std::abs(a * d - b * c) < 1e-14 * scale * scale)
        throw Error("fractional_reflection: singular coefficient matrix");
    SurfaceMap r;
    r.surface_ = Surface::Sphere;
    r.kind_ = MapKind::FractionalReflection;
    r.orientation_ = Orientation::Reversing;
    r.params_ = {a.real(), a.imag(), b.real(), b.imag(),
                 c.real(), c.imag(), d.real(), d.imag()};
    return r;
}

SurfaceMap SurfaceMap::rotation_profile(std::vector<std::pair<double, double>> knots) {
    if (knots.empty()) throw Error("rotation_profile: no knots");
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (knots[i].first <= knots[i - 1].first)
            throw Error("rotation_profile: knot radii must increase");
    if (knots.front().first < 0.0) throw Error("rotation_profile: negative radius");
    SurfaceMap r;
    r.surface_ = Surface::Sphere;
    r.kind_ = MapKind::RotationProfile;
    for (auto [rad, ang] : knots) {
        r.params_.push_back(rad);
        r.params_.push_back(ang);
    }
    return r;
}

SurfaceMap SurfaceMap::radial_warp(double amp) {
    if (std::fabs(amp) >= 0.5) throw Error("radial_warp: |amp| must be < 0.5");
    SurfaceMap r;
    r.surface_ = Surface::Sphere;
    r.kind_ = MapKind::RadialWarp;
    r.params_ = {amp};
    return r;
}

SurfaceMap SurfaceMap::torus_translation(double alpha, double beta) {
    SurfaceMap r;
    r.surface_ = Surface::Torus;
    r.kind_ = MapKind::TorusTranslation;
    r.lift_available_ = true;
    r.params_ = {alpha, beta};
    return r;
}

SurfaceMap SurfaceMap::torus_reversing_type1(double alpha) {
    SurfaceMap r;
    r.surface_ = Surface::Torus;
    r.kind_ = MapKind::TorusReversingType1;
    r.orientation_ = Orientation::Reversing;
    r.lift_available_ = true;
    r.params_ = {alpha};
    return r;
}

SurfaceMap SurfaceMap::torus_reversing_type2(double alpha) {
    SurfaceMap r;
    r.surface_ = Surface::Torus;
    r.kind_ = MapKind::TorusReversingType2;
    r.orientation_ = Orientation::Reversing;
    r.lift_available_ = true;
    r.params_ = {alpha};
    return r;
}

SurfaceMap SurfaceMap::torus_linear(Mat2i A) {
    int d = A.det();
    if (d != 1 && d != -1) throw Error("torus_linear: determinant must be +-1");
    SurfaceMap r;
    r.surface_ = Surface::Torus;
    r.kind_ = MapKind::TorusLinear;
    r.orientation_ = d == 1 ? Orientation::Preserving : Orientation::Reversing;
    r.lift_available_ = true;
    r.params_ = {double(A.m[0][0]), double(A.m[0][1]), double(A.m[1][0]), double(A.m[1][1])};
    return r;
}

SurfaceMap SurfaceMap::torus_warp_s(double amp, double phase, double freq) {
    SurfaceMap r;
    r.surface_ = Surface::Torus;
    r.kind_ = MapKind::TorusWarpS;
    r.lift_available_ = true;
    r.params_ = {amp, phase, freq};
    return r;
}

SurfaceMap SurfaceMap::torus_warp_t(double amp, double phase, double freq) {
    SurfaceMap r;
    r.surface_ = Surface::Torus;
    r.kind_ = MapKind::TorusWarpT;
    r.lift_available_ = true;
    r.params_ = {amp, phase, freq};
    return r;
}

namespace {

SurfacePoint theta0_torus(const SurfacePoint& p) {
    Vec2 q = klein_involution(Vec2{p.s(), p.t()});
    return torus_point(q[0], q[1]);
}

}  // namespace

SurfaceMap SurfaceMap::klein_lift(SurfaceMap torus_map) {
    if (torus_map.surface() != Surface::Torus)
        throw Error("klein_lift: lift must be a torus map");
    Rng rng(0x6b6c65696eULL);
    for (int i = 0; i < 32; ++i) {
        SurfacePoint p = torus_point(rng.uniform(), rng.uniform());
        SurfacePoint a = torus_map.forward(theta0_torus(p));
        SurfacePoint b = theta0_torus(torus_map.forward(p));
        if (surface_distance(a, b) > 1e-9)
            throw ThetaCommutationFailure("klein_lift: lift does not commute with the covering involution");
    }
    SurfaceMap r;
    r.surface_ = Surface::Klein;
    r.kind_ = MapKind::KleinLift;
    r.orientation_ = torus_map.orientation();
    r.lift_available_ = torus_map.has_lift();
    r.chain_ = {std::move(torus_map)};
    return r;
}

SurfaceMap SurfaceMap::klein_phi(double alpha) {
    return klein_lift(torus_translation(0.0, alpha));
}

SurfaceMap SurfaceMap::klein_psi(double alpha) {
    return klein_lift(torus_translation(0.5, alpha));
}

SurfaceMap SurfaceMap::klein_warp(double amp) {
    // t += amp cos(2 pi s) = amp sin(2 pi s + pi/2); even in s, so it
    // commutes with (s,t) -> (-s, t+1/2)
    return klein_lift(torus_warp_t(amp, M_PI / 2.0));
}

SurfaceMap SurfaceMap::annulus_rotation(double alpha) {
    SurfaceMap r;
    r.surface_ = Surface::Annulus;
    r.kind_ = MapKind::AnnulusRotation;
    r.params_ = {alpha};
    return r;
}

SurfaceMap SurfaceMap::annulus_reversing(double alpha) {
    SurfaceMap r;
    r.surface_ = Surface::Annulus;
    r.kind_ = MapKind::AnnulusReversing;
    r.orientation_ = Orientation::Reversing;
    r.params_ = {alpha};
    return r;
}

SurfaceMap SurfaceMap::annulus_warp(double amp) {
    SurfaceMap r;
    r.surface_ = Surface::Annulus;
    r.kind_ = MapKind::AnnulusWarp;
    r.params_ = {amp};
    return r;
}

SurfaceMap SurfaceMap::mobius_strip_lift(SurfaceMap annulus_map) {
    if (annulus_map.surface() != Surface::Annulus)
        throw Error("mobius_strip_lift: lift must be an annulus map");
    Rng rng(0x7374726970ULL);
    for (int i = 0; i < 32; ++i) {
        SurfacePoint p = annulus_point(rng.uniform(-1.0, 1.0), rng.uniform());
        Vec2 jp = strip_involution(Vec2{p.s(), p.t()});
        SurfacePoint a = annulus_map.forward(annulus_point(jp[0], jp[1]));
        Vec2 fb = [&] {
            SurfacePoint q = annulus_map.forward(p);
            return strip_involution(Vec2{q.s(), q.t()});
        }();
        if (surface_distance(a, annulus_point(fb[0], fb[1])) > 1e-9)
            throw ThetaCommutationFailure("mobius_strip_lift: lift does not commute with the strip involution");
    }
    SurfaceMap r;
    r.surface_ = Surface::MobiusStrip;
    r.kind_ = MapKind::MobiusStripLift;
    r.orientation_ = annulus_map.orientation();
    r.chain_ = {std::move(annulus_map)};
    return r;
}

SurfaceMap SurfaceMap::mobius_strip_rotation(double alpha) {
    return mobius_strip_lift(annulus_rotation(alpha));
}

SurfaceMap SurfaceMap::double_to_torus(SurfaceMap a) {
    if (a.surface() != Surface::Annulus) throw Error("double_to_torus: expected annulus map");
    switch (a.kind()) {
        case MapKind::Identity:
            return identity(Surface::Torus);
        case MapKind::AnnulusRotation:
            return torus_translation(0.0, a.params()[0]);
        case MapKind::AnnulusReversing: {
            // u -> 1/2 - u is the reversing normal form shifted by 1/4
            std::vector<SurfaceMap> ch;
            ch.push_back(torus_translation(-0.25, 0.0));
            ch.push_back(torus_reversing_type1(a.params()[0]));
            ch.push_back(torus_translation(0.25, 0.0));
            return compose(std::move(ch));
        }
        case MapKind::AnnulusWarp:
            // cos(pi s(u)) = -cos(4 pi u) on both copies
            return torus_warp_t(-a.params()[0], M_PI / 2.0, 2.0);
        case MapKind::Inverted:
            return double_to_torus(a.chain()[0]).inverted();
        case MapKind::Composite: {
            std::vector<SurfaceMap> ch;
            for (const auto& g : a.chain()) ch.push_back(double_to_torus(g));
            return compose(std::move(ch));
        }
        default:
            break;
    }
    // generic fallback: chart transport without a plane lift
    SurfaceMap r;
    r.surface_ = Surface::Torus;
    r.kind_ = MapKind::DoubledAnnulus;
    r.orientation_ = a.orientation();
    r.lift_available_ = false;
    r.chain_ = {std::move(a)};
    return r;
}

namespace {

// annulus-level representative of a strip map (built from lifts, possibly
// composed or inverted)
SurfaceMap strip_annulus_rep(const SurfaceMap& m) {
    switch (m.kind()) {
        case MapKind::MobiusStripLift:
            return m.chain()[0];
        case MapKind::Identity:
            return SurfaceMap::identity(Surface::Annulus);
        case MapKind::Inverted:
            return strip_annulus_rep(m.chain()[0]).inverted();
        case MapKind::Composite: {
            std::vector<SurfaceMap> ch;
            for (const auto& g : m.chain()) ch.push_back(strip_annulus_rep(g));
            return SurfaceMap::compose(std::move(ch));
        }
        default:
            throw Error("strip map without an annulus representative");
    }
}

}  // namespace

SurfaceMap SurfaceMap::double_to_klein(SurfaceMap strip_map) {
    if (strip_map.surface() != Surface::MobiusStrip)
        throw Error("double_to_klein: expected Mobius strip map");
    SurfaceMap doubled = double_to_torus(strip_annulus_rep(strip_map));
    // shift by 1/4 so the doubled strip involution becomes (s,t)->(-s,t+1/2)
    std::vector<SurfaceMap> ch;
    ch.push_back(torus_translation(0.25, 0.0));
    ch.push_back(std::move(doubled));
    ch.push_back(torus_translation(-0.25, 0.0));
    return klein_lift(compose(std::move(ch)));
}

SurfaceMap SurfaceMap::compose(std::vector<SurfaceMap> chain) {
    if (chain.empty()) throw Error("compose: empty chain");
    if (chain.size() == 1) return chain[0];
    Surface s = chain.front().surface();
    bool lift = true;
    int reversals = 0;
    int leaves = 0;
    for (const auto& g : chain) {
        if (g.surface() != s) throw SurfaceMismatch("compose: mixed surfaces in chain");
        lift = lift && g.has_lift();
        if (g.orientation() == Orientation::Reversing) ++reversals;
        leaves += leaf_count(g);
    }
    if (leaves > 64) throw Error("compose: composition depth over 64");
    SurfaceMap r;
    r.surface_ = s;
    r.kind_ = MapKind::Composite;
    r.orientation_ = reversals % 2 == 0 ? Orientation::Preserving : Orientation::Reversing;
    r.lift_available_ = lift;
    r.chain_ = std::move(chain);
    return r;
}

SurfaceMap SurfaceMap::conjugate(const SurfaceMap& w, const SurfaceMap& f) {
    std::vector<SurfaceMap> ch;
    ch.push_back(w.inverted());
    ch.push_back(f);
    ch.push_back(w);
    return compose(std::move(ch));
}

Mat2i homology_matrix_of(const SurfaceMap& f) {
    if (!f.has_lift()) throw NoLift("homology_matrix_of: map has no lift");
    const Vec2 x0{0.37, 0.61};
    Vec2 base = f.lift_forward(x0);
    Mat2i A;
    double residual = 0.0;
    for (int j = 0; j < 2; ++j) {
        Vec2 shifted = x0;
        shifted[j] += 1.0;
        Vec2 img = f.lift_forward(shifted);
        for (int i = 0; i < 2; ++i) {
            double v = img[i] - base[i];
            int r = static_cast<int>(std::lround(v));
            residual = std::max(residual, std::fabs(v - r));
            A.m[i][j] = r;
        }
    }
    if (residual > 1e-3)
        throw NonIntegerHolonomy("homology_matrix_of: lattice residual " + std::to_string(residual));
    return A;
}

int jacobian_sign(const SurfaceMap& f, const SurfacePoint& x, double h) {
    // non-orientable quotients have no chart-consistent sign; measure the
    // declared lift instead
    if (f.kind() == MapKind::KleinLift)
        return jacobian_sign(f.chain()[0], torus_point(x.s(), x.t()), h);
    if (f.kind() == MapKind::MobiusStripLift)
        return jacobian_sign(f.chain()[0], annulus_point(x.s(), x.t()), h);
    if (x.surface == Surface::Klein || x.surface == Surface::MobiusStrip) {
        if (f.kind() == MapKind::Inverted)
            return jacobian_sign(f.chain()[0], f.forward(x), h);
        if (f.kind() == MapKind::Composite) {
            int sign = 1;
            SurfacePoint p = x;
            for (const auto& g : f.chain()) {
                sign *= jacobian_sign(g, p, h);
                p = g.forward(p);
            }
            return sign;
        }
    }
    if (x.surface == Surface::Sphere) {
        auto [e1, e2] = sphere_tangent_frame(x);
        SurfacePoint fx = f.forward(x);
        auto [g1, g2] = sphere_tangent_frame(fx);
        auto shift = [&](double a, double b) {
            return f.forward(sphere_point(x.x() + a * e1[0] + b * e2[0],
                                          x.y() + a * e1[1] + b * e2[1],
                                          x.z() + a * e1[2] + b * e2[2]));
        };
        auto coords = [&](const SurfacePoint& p) {
            double u = (p.x() - fx.x()) * g1[0] + (p.y() - fx.y()) * g1[1] +
                       (p.z() - fx.z()) * g1[2];
            double v = (p.x() - fx.x()) * g2[0] + (p.y() - fx.y()) * g2[1] +
                       (p.z() - fx.z()) * g2[2];
            return Vec2{u, v};
        };
        Vec2 du1 = coords(shift(h, 0.0)), du0 = coords(shift(-h, 0.0));
        Vec2 dv1 = coords(shift(0.0, h)), dv0 = coords(shift(0.0, -h));
        double a = (du1[0] - du0[0]), b = (dv1[0] - dv0[0]);
        double c = (du1[1] - du0[1]), d = (dv1[1] - dv0[1]);
        return (a * d - b * c) >= 0.0 ? 1 : -1;
    }
    SurfacePoint fx = f.forward(x);
    Vec2 du1 = chart_delta(fx, f.forward(chart_shift(x, Vec2{h, 0.0})));
    Vec2 du0 = chart_delta(fx, f.forward(chart_shift(x, Vec2{-h, 0.0})));
    Vec2 dv1 = chart_delta(fx, f.forward(chart_shift(x, Vec2{0.0, h})));
    Vec2 dv0 = chart_delta(fx, f.forward(chart_shift(x, Vec2{0.0, -h})));
    double a = du1[0] - du0[0], b = dv1[0] - dv0[0];
    double c = du1[1] - du0[1], d = dv1[1] - dv0[1];
    return (a * d - b * c) >= 0.0 ? 1 : -1;
}

}  // namespace kere
