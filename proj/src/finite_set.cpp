#include "kere/finite_set.hpp"

#include <algorithm>
#include <cmath>

namespace kere {

Surface FiniteSet::surface() const {
    if (points.empty()) throw EmptyInput("FiniteSet::surface on empty set");
    return points.front().surface;
}

void FiniteSet::validate() const {
    if (points.empty()) throw EmptyInput("FiniteSet: no points");
    for (const auto& p : points)
        if (p.surface != points.front().surface)
            throw SurfaceMismatch("FiniteSet: mixed surface tags");
    if (mesh < 0.0) throw Error("FiniteSet: negative mesh");
}

Surface SetSequence::surface() const {
    if (items.empty()) throw EmptyInput("SetSequence::surface on empty sequence");
    return items.front().surface();
}

void SetSequence::validate() const {
    if (items.empty()) throw EmptyInput("SetSequence: no items");
    for (const auto& it : items) {
        it.validate();
        if (it.surface() != items.front().surface())
            throw SurfaceMismatch("SetSequence: mixed surface tags");
    }
}

double point_set_distance(const SurfacePoint& p, const FiniteSet& A) {
    if (A.empty()) throw EmptyInput("point_set_distance: empty set");
    double best = surface_distance(p, A.points.front());
    for (std::size_t i = 1; i < A.points.size(); ++i)
        best = std::min(best, surface_distance(p, A.points[i]));
    return best;
}

namespace {

// max over a of min over b, breaking out of the inner loop as soon as the
// running min cannot raise the outer max
double directed_hausdorff(const FiniteSet& A, const FiniteSet& B, double cmax) {
    for (const auto& a : A.points) {
        double dmin = std::numeric_limits<double>::infinity();
        for (const auto& b : B.points) {
            double d = surface_distance(a, b);
            if (d < dmin) {
                dmin = d;
                if (dmin <= cmax) break;
            }
        }
        if (dmin > cmax) cmax = dmin;
    }
    return cmax;
}

}  // namespace

double hausdorff_distance(const FiniteSet& A, const FiniteSet& B) {
    A.validate();
    B.validate();
    if (A.surface() != B.surface())
        throw SurfaceMismatch("hausdorff_distance: different surfaces");
    double h = directed_hausdorff(A, B, 0.0);
    return directed_hausdorff(B, A, h);
}

std::optional<FiniteSet> liminf_sets(const SetSequence& seq, int tail, double eta) {
    seq.validate();
    if (tail <= 0 || tail > static_cast<int>(seq.items.size()))
        throw Error("liminf_sets: tail out of range");
    const FiniteSet& last = seq.items.back();
    FiniteSet out;
    out.mesh = 0.0;
    for (const auto& it : seq.items) out.mesh = std::max(out.mesh, it.mesh);
    const std::size_t n = seq.items.size();
    for (const auto& p : last.points) {
        bool in_all = true;
        for (std::size_t k = n - tail; k < n; ++k) {
            if (point_set_distance(p, seq.items[k]) > eta) {
                in_all = false;
                break;
            }
        }
        if (in_all) out.points.push_back(p);
    }
    if (out.points.empty()) return std::nullopt;
    return out;
}

FiniteSet limsup_sets(const SetSequence& seq, int tail, int recur_min, double eta) {
    seq.validate();
    if (tail <= 0 || tail > static_cast<int>(seq.items.size()))
        throw Error("limsup_sets: tail out of range");
    if (recur_min < 1 || recur_min > tail)
        throw Error("limsup_sets: recur_min out of range");
    const std::size_t n = seq.items.size();

    std::vector<SurfacePoint> candidates;
    for (std::size_t k = n - tail; k < n; ++k)
        for (const auto& p : seq.items[k].points) candidates.push_back(p);
    std::vector<SurfacePoint> reps = greedy_net(candidates, eta * 0.5);

    FiniteSet out;
    out.mesh = 0.0;
    for (const auto& it : seq.items) out.mesh = std::max(out.mesh, it.mesh);
    for (const auto& p : reps) {
        int hits = 0;
        for (std::size_t k = n - tail; k < n; ++k)
            if (point_set_distance(p, seq.items[k]) <= eta) ++hits;
        if (hits >= recur_min) out.points.push_back(p);
    }
    return out;
}

std::vector<SurfacePoint> greedy_net(const std::vector<SurfacePoint>& pts, double radius) {
    std::vector<SurfacePoint> kept;
    for (const auto& p : pts) {
        bool fresh = true;
        for (const auto& q : kept) {
            if (surface_distance(p, q) <= radius) {
                fresh = false;
                break;
            }
        }
        if (fresh) kept.push_back(p);
    }
    return kept;
}

std::vector<int> epsilon_components(const std::vector<SurfacePoint>& pts, double eps,
                                    int* count) {
    const std::size_t n = pts.size();
    std::vector<int> comp(n, -1);
    int next = 0;
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < n; ++i) {
        if (comp[i] >= 0) continue;
        comp[i] = next;
        stack.push_back(i);
        while (!stack.empty()) {
            std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t v = 0; v < n; ++v) {
                if (comp[v] >= 0) continue;
                if (surface_distance(pts[u], pts[v]) <= eps) {
                    comp[v] = next;
                    stack.push_back(v);
                }
            }
        }
        ++next;
    }
    if (count) *count = next;
    return comp;
}

bool is_epsilon_connected(const FiniteSet& A, double eps) {
    A.validate();
    if (eps <= 0.0) throw Error("is_epsilon_connected: eps must be positive");
    int count = 0;
    epsilon_components(A.points, eps, &count);
    return count == 1;
}

}  // namespace kere
