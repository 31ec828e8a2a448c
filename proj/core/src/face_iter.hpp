#pragma once

// Internal: staggered-face iteration for the weak-form quadrature. An
// axis face joins two adjacent nodes; its weight is the axis spacing
// times the transverse trapezoid weight, so summing f(face) * weight
// over all faces of one axis approximates the volume integral of a
// quantity living on that axis's differences.

#include <functional>

#include "varex/grid.hpp"

namespace varex::detail {

struct FaceRef {
  int axis;       // 0 = x, 1 = y
  int node_lo;    // flat index of the lower node
  int node_hi;    // flat index of the upper node
  double weight;  // h_axis * transverse quadrature weight
  double inv_h;   // 1 / h_axis
};

template <typename Fn>
void for_each_face(const SpatialGrid& g, Fn&& fn) {
  const int nx = g.nx(), ny = g.ny();
  auto axis_w = [](int i, int count, double h) {
    return (i == 0 || i == count - 1) ? 0.5 * h : h;
  };
  FaceRef f;
  f.axis = 0;
  f.inv_h = 1.0 / g.h[0];
  for (int ix = 0; ix + 1 < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) {
      f.node_lo = g.index(ix, iy);
      f.node_hi = g.index(ix + 1, iy);
      f.weight = g.h[0] * (g.dim == 2 ? axis_w(iy, ny, g.h[1]) : 1.0);
      fn(f);
    }
  }
  if (g.dim == 2) {
    f.axis = 1;
    f.inv_h = 1.0 / g.h[1];
    for (int ix = 0; ix < nx; ++ix) {
      for (int iy = 0; iy + 1 < ny; ++iy) {
        f.node_lo = g.index(ix, iy);
        f.node_hi = g.index(ix, iy + 1);
        f.weight = g.h[1] * axis_w(ix, nx, g.h[0]);
        fn(f);
      }
    }
  }
}

}  // namespace varex::detail
