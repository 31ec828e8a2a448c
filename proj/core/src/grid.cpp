#include "varex/grid.hpp"

#include <cmath>
#include <string>

namespace varex {

SpatialGrid make_spatial_grid(int dim, const std::vector<std::pair<double, double>>& bounds,
                              const std::vector<int>& n) {
  if (dim != 1 && dim != 2) throw GridError("grid dim must be 1 or 2, got " + std::to_string(dim));
  if (static_cast<int>(bounds.size()) != dim)
    throw GridError("expected " + std::to_string(dim) + " bounds pairs");
  if (static_cast<int>(n.size()) != dim)
    throw GridError("expected " + std::to_string(dim) + " node counts");

  SpatialGrid g;
  g.dim = dim;
  g.n = {1, 1};
  for (int a = 0; a < dim; ++a) {
    if (!(bounds[a].first < bounds[a].second))
      throw GridError("axis " + std::to_string(a) + ": need lo < hi");
    if (n[a] < 3) throw GridError("axis " + std::to_string(a) + ": need n >= 3 nodes");
    g.bounds[a] = bounds[a];
    g.n[a] = n[a];
    g.h[a] = (bounds[a].second - bounds[a].first) / (n[a] - 1);
  }
  if (dim == 1) {
    g.n[1] = 1;
    g.h[1] = 0.0;
    g.bounds[1] = {0.0, 0.0};
  }

  const int nx = g.n[0], ny = g.n[1];
  g.quad_weights.resize(static_cast<std::size_t>(nx) * ny);
  g.boundary_mask.assign(static_cast<std::size_t>(nx) * ny, 0);

  auto axis_w = [](int i, int count, double h) {
    return (i == 0 || i == count - 1) ? 0.5 * h : h;
  };

  for (int ix = 0; ix < nx; ++ix) {
    const double wx = axis_w(ix, nx, g.h[0]);
    const bool bx = (ix == 0 || ix == nx - 1);
    for (int iy = 0; iy < ny; ++iy) {
      const double wy = (dim == 2) ? axis_w(iy, ny, g.h[1]) : 1.0;
      const bool by = (dim == 2) && (iy == 0 || iy == ny - 1);
      const int node = g.index(ix, iy);
      g.quad_weights[node] = wx * wy;
      g.boundary_mask[node] = (bx || by) ? 1 : 0;
    }
  }
  return g;
}

SampleSpace make_sample_space(std::vector<double> samples, std::vector<double> probs) {
  if (samples.empty()) throw GridError("sample space must be nonempty");
  if (samples.size() != probs.size())
    throw GridError("samples and probs must have equal length");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p > 0.0)) throw GridError("sample probabilities must be positive");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw GridError("sample probabilities must sum to 1 (got " + std::to_string(sum) + ")");
  SampleSpace s;
  s.samples = std::move(samples);
  s.probs = std::move(probs);
  return s;
}

ProductMeasureGrid build_grid(int dim, const std::vector<std::pair<double, double>>& bounds,
                              const std::vector<int>& n, std::vector<double> samples,
                              std::vector<double> probs) {
  ProductMeasureGrid m;
  m.grid = make_spatial_grid(dim, bounds, n);
  m.omega = make_sample_space(std::move(samples), std::move(probs));
  return m;
}

SpatialGrid restrict_grid(const SpatialGrid& g, const SubBox& k) {
  for (int a = 0; a < g.dim; ++a) {
    if (k.lo[a] < 0 || k.hi[a] >= g.n[a] || k.hi[a] - k.lo[a] + 1 < 3)
      throw GridError("sub-box axis " + std::to_string(a) + " out of range or too small");
  }
  std::vector<std::pair<double, double>> b;
  std::vector<int> n;
  for (int a = 0; a < g.dim; ++a) {
    b.emplace_back(g.bounds[a].first + k.lo[a] * g.h[a], g.bounds[a].first + k.hi[a] * g.h[a]);
    n.push_back(k.hi[a] - k.lo[a] + 1);
  }
  return make_spatial_grid(g.dim, b, n);
}

}  // namespace varex
