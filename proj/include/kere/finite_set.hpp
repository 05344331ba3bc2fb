#pragma once

#include <optional>
#include <vector>

#include "kere/surface.hpp"

namespace kere {

/// Finite epsilon-net standing in for a compact subset of a surface.
/// `mesh` is the claimed net radius; 0 means the set is exact.
struct FiniteSet {
    std::vector<SurfacePoint> points;
    double mesh = 0.0;

    Surface surface() const;
    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    void validate() const;  // nonempty, one surface tag
};

struct SetSequence {
    std::vector<FiniteSet> items;

    Surface surface() const;
    void validate() const;
};

/// Distance from a point to a finite set.
double point_set_distance(const SurfacePoint& p, const FiniteSet& A);

/// Hausdorff distance, exact over the finite sets. Uses an early-break
/// scan; equal to the plain double-loop evaluation bit for bit.
double hausdorff_distance(const FiniteSet& A, const FiniteSet& B);

/// Window approximation of the lower set limit: a point of the last item
/// survives if every item of the final `tail` window has a point within
/// eta. Empty outcome is a value, not an error.
std::optional<FiniteSet> liminf_sets(const SetSequence& seq, int tail, double eta);

/// Upper set limit over the same window: a candidate survives if at least
/// `recur_min` window items contain a point within eta.
FiniteSet limsup_sets(const SetSequence& seq, int tail, int recur_min, double eta);

/// Connectivity of the graph with edges d(a,b) <= eps.
bool is_epsilon_connected(const FiniteSet& A, double eps);

/// Greedy eps-net in input order; keeps the first point of each cluster.
std::vector<SurfacePoint> greedy_net(const std::vector<SurfacePoint>& pts, double radius);

/// Connected components of the eps-graph; returns component index per point.
std::vector<int> epsilon_components(const std::vector<SurfacePoint>& pts, double eps,
                                    int* count = nullptr);

}  // namespace kere
