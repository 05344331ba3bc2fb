#pragma once

#include <functional>

#include "kere/surface_map.hpp"

namespace kere {

/// Monotone degree-one circle self-map given by a lift F with
/// F(x+1) = F(x) + 1. Construction checks periodicity and monotonicity
/// on samples and throws NotDegreeOne otherwise.
class CircleMap {
public:
    static CircleMap rotation(double alpha);
    static CircleMap from_lift(std::function<double(double)> lift);

    double lift(double x) const { return lift_(x); }
    double forward(double x) const { return reduce_mod1(lift_(x)); }
    CircleMap power(int n) const;  // n >= 1

private:
    CircleMap() = default;
    std::function<double(double)> lift_;
};

struct RotationNumber {
    double value = 0.0;       // in [0, 1)
    double error_bound = 0.0; // 1/horizon for the Birkhoff quotient
};

/// Plain Birkhoff quotient (F^h(x0) - x0)/h reduced mod 1.
RotationNumber rotation_number(const CircleMap& c, double x0, long horizon);

struct TranslationVector {
    Vec2 value{0.0, 0.0};
    long horizon = 0;
    double spread = 0.0;  // diameter of the estimate over 10 base points
};

/// (lift^h(x0) - x0)/h for a lift acting trivially on the deck lattice.
/// `lift_offset` selects the alternative lift shifted by that integer
/// vector. Throws NonTrivialHomology unless the lattice action is the
/// identity, NoLift when no lift exists.
TranslationVector translation_vector(const SurfaceMap& f, Vec2 x0, long horizon,
                                     std::array<int, 2> lift_offset = {0, 0});

/// Translation vector reduced mod Z^2, independent of the lift choice.
Vec2 rotation_vector(const SurfaceMap& f, long horizon);

/// Measured bound of sup |lift(x) - x| over sample points.
double lift_displacement_bound(const SurfaceMap& f, int samples = 128);

struct ZeroVectorDiagnostic {
    double theta_norm = 0.0;
    double min_grid_displacement = 0.0;
    bool theta_zero = false;
    bool fixed_point_found = false;
    bool agree = false;
};

/// Cross-checks "translation vector vanishes" against "the lift has a
/// near-fixed grid point". Diagnostic only.
ZeroVectorDiagnostic vector_is_zero_iff_fixed_point_check(const SurfaceMap& f, long horizon,
                                                          int grid_resolution, double tol);

}  // namespace kere
