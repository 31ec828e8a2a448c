#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "varex/errors.hpp"

namespace varex {

/// Uniform tensor grid on a box in R^d, d in {1,2}, with composite
/// trapezoid quadrature weights and a boundary mask. Node ordering is
/// row-major with the x axis outermost: node = ix * ny + iy.
struct SpatialGrid {
  int dim = 1;
  std::array<std::pair<double, double>, 2> bounds{{{0.0, 1.0}, {0.0, 1.0}}};
  std::array<int, 2> n{{0, 1}};      // n[1] == 1 when dim == 1
  std::array<double, 2> h{{0.0, 0.0}};
  std::vector<double> quad_weights;  // per node
  std::vector<std::uint8_t> boundary_mask;

  int nx() const { return n[0]; }
  int ny() const { return n[1]; }
  int n_nodes() const { return n[0] * n[1]; }
  int index(int ix, int iy = 0) const { return ix * n[1] + iy; }

  double x_of(int ix) const { return bounds[0].first + ix * h[0]; }
  double y_of(int iy) const { return dim == 2 ? bounds[1].first + iy * h[1] : 0.0; }

  /// (x, y) of a flat node index; y is 0 for 1-D grids.
  std::array<double, 2> coords(int node) const {
    int ix = node / n[1];
    int iy = node % n[1];
    return {x_of(ix), y_of(iy)};
  }

  bool is_boundary(int node) const { return boundary_mask[node] != 0; }

  double measure() const {
    double m = bounds[0].second - bounds[0].first;
    if (dim == 2) m *= bounds[1].second - bounds[1].first;
    return m;
  }

  int boundary_count() const {
    int c = 0;
    for (auto b : boundary_mask) c += (b != 0);
    return c;
  }
};

/// Finite weighted sample set standing for the probability space:
/// labels t_1..t_m with probabilities summing to 1.
struct SampleSpace {
  std::vector<double> samples;
  std::vector<double> probs;

  int size() const { return static_cast<int>(samples.size()); }
};

/// The discretized product measure: spatial quadrature x sample weights.
struct ProductMeasureGrid {
  SpatialGrid grid;
  SampleSpace omega;

  int n_nodes() const { return grid.n_nodes(); }
  int n_samples() const { return omega.size(); }
};

SpatialGrid make_spatial_grid(int dim, const std::vector<std::pair<double, double>>& bounds,
                              const std::vector<int>& n);

SampleSpace make_sample_space(std::vector<double> samples, std::vector<double> probs);

ProductMeasureGrid build_grid(int dim, const std::vector<std::pair<double, double>>& bounds,
                              const std::vector<int>& n, std::vector<double> samples,
                              std::vector<double> probs);

/// Index ranges [lo, hi] per axis describing a node-aligned sub-box.
struct SubBox {
  std::array<int, 2> lo{{0, 0}};
  std::array<int, 2> hi{{0, 0}};
};

/// Grid over the sub-box [x_lo..x_hi] x [y_lo..y_hi] of `g`, sharing its
/// nodes; trapezoid weights are recomputed for the smaller box.
SpatialGrid restrict_grid(const SpatialGrid& g, const SubBox& k);

}  // namespace varex
