#include "kere/rotation.hpp"

#include <cmath>

#include "kere/orbit.hpp"
#include "kere/rng.hpp"

namespace kere {

CircleMap CircleMap::rotation(double alpha) {
    CircleMap c;
    c.lift_ = [alpha](double x) { return x + alpha; };
    return c;
}

CircleMap CircleMap::from_lift(std::function<double(double)> lift) {
    CircleMap c;
    c.lift_ = std::move(lift);
    double prev = c.lift_(0.0);
    for (int k = 1; k <= 64; ++k) {
        double x = k / 64.0;
        double v = c.lift_(x);
        if (v <= prev) throw NotDegreeOne("lift is not strictly increasing");
        prev = v;
        if (std::fabs(c.lift_(x + 1.0) - c.lift_(x) - 1.0) > 1e-9)
            throw NotDegreeOne("lift periodicity F(x+1) = F(x)+1 fails");
    }
    return c;
}

CircleMap CircleMap::power(int n) const {
    if (n < 1) throw Error("CircleMap::power: n must be >= 1");
    auto base = lift_;
    CircleMap c;
    c.lift_ = [base, n](double x) {
        double v = x;
        for (int i = 0; i < n; ++i) v = base(v);
        return v;
    };
    return c;
}

RotationNumber rotation_number(const CircleMap& c, double x0, long horizon) {
    if (horizon < 100) throw Error("rotation_number: horizon must be >= 100");
    double x = x0;
    for (long n = 0; n < horizon; ++n) x = c.lift(x);
    RotationNumber rho;
    rho.value = reduce_mod1((x - x0) / double(horizon));
    rho.error_bound = 1.0 / double(horizon);
    return rho;
}

namespace {

Vec2 lift_iterate(const SurfaceMap& f, Vec2 x, long n, const std::array<int, 2>& off) {
    Vec2 p = x;
    for (long i = 0; i < n; ++i) {
        p = f.lift_forward(p);
        p[0] += off[0];
        p[1] += off[1];
    }
    return p;
}

}  // namespace

TranslationVector translation_vector(const SurfaceMap& f, Vec2 x0, long horizon,
                                     std::array<int, 2> lift_offset) {
    if (!f.has_lift()) throw NoLift("translation_vector");
    Mat2i A = homology_matrix_of(f);
    if (!(A == Mat2i::identity()))
        throw NonTrivialHomology("translation_vector: lattice action is not the identity");
    if (horizon < 1) throw Error("translation_vector: horizon must be positive");

    TranslationVector tv;
    tv.horizon = horizon;
    Vec2 end = lift_iterate(f, x0, horizon, lift_offset);
    tv.value = Vec2{(end[0] - x0[0]) / double(horizon), (end[1] - x0[1]) / double(horizon)};

    // spread over ten spare base points; each estimate uses the same lift
    Rng rng(0x74726e76ULL);
    std::vector<Vec2> estimates{tv.value};
    for (int k = 0; k < 9; ++k) {
        Vec2 b{rng.uniform(), rng.uniform()};
        Vec2 e = lift_iterate(f, b, horizon, lift_offset);
        estimates.push_back(
            Vec2{(e[0] - b[0]) / double(horizon), (e[1] - b[1]) / double(horizon)});
    }
    double spread = 0.0;
    for (std::size_t i = 0; i < estimates.size(); ++i)
        for (std::size_t j = i + 1; j < estimates.size(); ++j)
            spread = std::max(spread, std::hypot(estimates[i][0] - estimates[j][0],
                                                 estimates[i][1] - estimates[j][1]));
    tv.spread = spread;
    return tv;
}

Vec2 rotation_vector(const SurfaceMap& f, long horizon) {
    TranslationVector tv = translation_vector(f, Vec2{0.31, 0.57}, horizon);
    return Vec2{reduce_mod1(tv.value[0]), reduce_mod1(tv.value[1])};
}

double lift_displacement_bound(const SurfaceMap& f, int samples) {
    if (!f.has_lift()) throw NoLift("lift_displacement_bound");
    Rng rng(0x626f756eULL);
    double m = 0.0;
    for (int i = 0; i < samples; ++i) {
        Vec2 x{rng.uniform(), rng.uniform()};
        Vec2 y = f.lift_forward(x);
        m = std::max(m, std::hypot(y[0] - x[0], y[1] - x[1]));
    }
    return m;
}

ZeroVectorDiagnostic vector_is_zero_iff_fixed_point_check(const SurfaceMap& f, long horizon,
                                                          int grid_resolution, double tol) {
    ZeroVectorDiagnostic diag;
    TranslationVector tv = translation_vector(f, Vec2{0.2, 0.8}, horizon);
    diag.theta_norm = std::hypot(tv.value[0], tv.value[1]);
    diag.theta_zero = diag.theta_norm < tol;

    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid_resolution; ++i) {
        for (int j = 0; j < grid_resolution; ++j) {
            Vec2 x{(i + 0.5) / grid_resolution, (j + 0.5) / grid_resolution};
            Vec2 y = f.lift_forward(x);
            best = std::min(best, std::hypot(y[0] - x[0], y[1] - x[1]));
        }
    }
    diag.min_grid_displacement = best;
    diag.fixed_point_found = best < tol;
    diag.agree = diag.theta_zero == diag.fixed_point_found;
    return diag;
}

}  // namespace kere
