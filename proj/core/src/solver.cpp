#include "varex/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

#include "face_iter.hpp"
#include "varex/util.hpp"

namespace varex {

namespace {

struct FacePoint {
  detail::FaceRef ref;
  double theta = 0.0;
  double p = 0.0;
  double x = 0.0, y = 0.0;
};

struct SampleProblem {
  const SpatialGrid* grid = nullptr;
  double t = 0.0;
  std::vector<FacePoint> faces;
  std::vector<double> theta, pexp, f;    // per node
  std::vector<int> unknown_of_node;      // -1 on boundary
  std::vector<int> node_of_unknown;
  int n_unknowns = 0;
};

SampleProblem make_sample_problem(const ExponentField& p, const WeightField& w,
                                  const StochasticField& f, const ProductMeasureGrid& m,
                                  int t_index) {
  SampleProblem sp;
  sp.grid = &m.grid;
  sp.t = m.omega.samples[t_index];
  const int nn = m.n_nodes();
  sp.theta.assign(w.data.sample_slice(t_index).begin(), w.data.sample_slice(t_index).end());
  sp.pexp.assign(p.data.sample_slice(t_index).begin(), p.data.sample_slice(t_index).end());
  sp.f.assign(f.data.sample_slice(t_index).begin(), f.data.sample_slice(t_index).end());

  sp.unknown_of_node.assign(nn, -1);
  for (int node = 0; node < nn; ++node) {
    if (!m.grid.is_boundary(node)) {
      sp.unknown_of_node[node] = sp.n_unknowns++;
      sp.node_of_unknown.push_back(node);
    }
  }
  detail::for_each_face(m.grid, [&](const detail::FaceRef& fr) {
    FacePoint fp;
    fp.ref = fr;
    fp.theta = 0.5 * (sp.theta[fr.node_lo] + sp.theta[fr.node_hi]);
    fp.p = 0.5 * (sp.pexp[fr.node_lo] + sp.pexp[fr.node_hi]);
    const auto clo = m.grid.coords(fr.node_lo);
    const auto chi = m.grid.coords(fr.node_hi);
    fp.x = 0.5 * (clo[0] + chi[0]);
    fp.y = 0.5 * (clo[1] + chi[1]);
    sp.faces.push_back(fp);
  });
  return sp;
}

// Nodal gradient of one sample slice (same stencils as gradient()).
void nodal_gradient(const SpatialGrid& g, const std::vector<double>& u, std::vector<double>& dx,
                    std::vector<double>& dy) {
  const int nx = g.nx(), ny = g.ny();
  dx.assign(u.size(), 0.0);
  auto d1 = [](const double* s, double* d, int count, int stride, double h) {
    const double inv2h = 1.0 / (2.0 * h);
    auto at = [&](int i) { return s[static_cast<std::size_t>(i) * stride]; };
    d[0] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) * inv2h;
    for (int i = 1; i < count - 1; ++i)
      d[static_cast<std::size_t>(i) * stride] = (at(i + 1) - at(i - 1)) * inv2h;
    d[static_cast<std::size_t>(count - 1) * stride] =
        (3.0 * at(count - 1) - 4.0 * at(count - 2) + at(count - 3)) * inv2h;
  };
  if (g.dim == 1) {
    d1(u.data(), dx.data(), nx, 1, g.h[0]);
    dy.clear();
    return;
  }
  dy.assign(u.size(), 0.0);
  for (int iy = 0; iy < ny; ++iy) d1(u.data() + iy, dx.data() + iy, nx, ny, g.h[0]);
  for (int ix = 0; ix < nx; ++ix)
    d1(u.data() + static_cast<std::size_t>(ix) * ny, dy.data() + static_cast<std::size_t>(ix) * ny,
       ny, 1, g.h[1]);
}

// Face gradient vector: axial difference; transverse from the nodal
// gradient averaged across the face.
std::array<double, 2> face_xi(const SampleProblem& sp, const FacePoint& fp,
                              const std::vector<double>& u, const std::vector<double>& dx,
                              const std::vector<double>& dy) {
  const auto& fr = fp.ref;
  const double axial = (u[fr.node_hi] - u[fr.node_lo]) * fr.inv_h;
  std::array<double, 2> xi{axial, 0.0};
  if (sp.grid->dim == 2) {
    const auto& trans = fr.axis == 0 ? dy : dx;
    const double other = 0.5 * (trans[fr.node_lo] + trans[fr.node_hi]);
    xi[fr.axis] = axial;
    xi[1 - fr.axis] = other;
  }
  return xi;
}

// Frozen diffusion coefficients per face for the current iterate.
void frozen_coefficients(const SampleProblem& sp, const std::vector<double>& u, double eps_reg,
                         std::vector<double>& coef) {
  std::vector<double> dx, dy;
  nodal_gradient(*sp.grid, u, dx, dy);
  coef.resize(sp.faces.size());
  for (std::size_t i = 0; i < sp.faces.size(); ++i) {
    const auto& fp = sp.faces[i];
    const auto xi = face_xi(sp, fp, u, dx, dy);
    const double mag2 = xi[0] * xi[0] + xi[1] * xi[1];
    coef[i] = fp.theta * std::pow(mag2 + eps_reg * eps_reg, 0.5 * (fp.p - 2.0));
  }
}

// Lagged lower-order term at nodes.
void lower_order_term(const SampleProblem& sp, const ProblemSpec& spec,
                      const std::vector<double>& u, std::vector<double>& a0) {
  std::vector<double> dx, dy;
  nodal_gradient(*sp.grid, u, dx, dy);
  a0.resize(u.size());
  const int dim = sp.grid->dim;
  for (int node = 0; node < static_cast<int>(u.size()); ++node) {
    KernelArgs a;
    a.dim = dim;
    const auto c = sp.grid->coords(node);
    a.x = c[0];
    a.y = c[1];
    a.t = sp.t;
    a.s = u[node];
    a.theta = sp.theta[node];
    a.p = sp.pexp[node];
    a.xi = {dx[node], dim == 2 ? dy[node] : 0.0};
    a0[node] = spec.A0(a);
  }
}

// y = M x for the frozen-coefficient diffusion stencil on interior
// unknowns (Dirichlet zeros outside).
void stencil_matvec(const SampleProblem& sp, const std::vector<double>& coef,
                    const std::vector<double>& x, std::vector<double>& y) {
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t i = 0; i < sp.faces.size(); ++i) {
    const auto& fr = sp.faces[i].ref;
    const int ul = sp.unknown_of_node[fr.node_lo];
    const int uh = sp.unknown_of_node[fr.node_hi];
    if (ul < 0 && uh < 0) continue;
    const double xl = ul >= 0 ? x[ul] : 0.0;
    const double xh = uh >= 0 ? x[uh] : 0.0;
    const double flux = coef[i] * fr.weight * fr.inv_h * fr.inv_h * (xh - xl);
    if (uh >= 0) y[uh] += flux;
    if (ul >= 0) y[ul] -= flux;
  }
}

void stencil_diagonal(const SampleProblem& sp, const std::vector<double>& coef,
                      std::vector<double>& d) {
  d.assign(sp.n_unknowns, 0.0);
  for (std::size_t i = 0; i < sp.faces.size(); ++i) {
    const auto& fr = sp.faces[i].ref;
    const double c = coef[i] * fr.weight * fr.inv_h * fr.inv_h;
    const int ul = sp.unknown_of_node[fr.node_lo];
    const int uh = sp.unknown_of_node[fr.node_hi];
    if (uh >= 0) d[uh] += c;
    if (ul >= 0) d[ul] += c;
  }
}

// Jacobi-preconditioned conjugate gradients; x holds the initial guess.
int pcg_solve(const SampleProblem& sp, const std::vector<double>& coef,
              const std::vector<double>& b, std::vector<double>& x, double rel_tol) {
  const int n = sp.n_unknowns;
  std::vector<double> r(n), z(n), q(n), dinv(n), s(n);
  stencil_diagonal(sp, coef, dinv);
  for (double& v : dinv) v = v > 0.0 ? 1.0 / v : 1.0;

  stencil_matvec(sp, coef, x, q);
  double b2 = 0.0;
  for (int i = 0; i < n; ++i) {
    r[i] = b[i] - q[i];
    b2 += b[i] * b[i];
  }
  const double stop2 = std::max(rel_tol * rel_tol * b2, 1e-280);

  double rz = 0.0;
  for (int i = 0; i < n; ++i) {
    z[i] = dinv[i] * r[i];
    rz += r[i] * z[i];
  }
  s = z;

  const int max_iter = 40 * n + 200;
  for (int it = 0; it < max_iter; ++it) {
    double r2 = 0.0;
    for (int i = 0; i < n; ++i) r2 += r[i] * r[i];
    if (r2 <= stop2) return it;

    stencil_matvec(sp, coef, s, q);
    double sq = 0.0;
    for (int i = 0; i < n; ++i) sq += s[i] * q[i];
    if (!(sq > 0.0)) throw SolveError("pcg: lost positive definiteness");
    const double alpha = rz / sq;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * s[i];
      r[i] -= alpha * q[i];
    }
    double rz_new = 0.0;
    for (int i = 0; i < n; ++i) {
      z[i] = dinv[i] * r[i];
      rz_new += r[i] * z[i];
    }
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) s[i] = z[i] + beta * s[i];
  }
  throw SolveError("pcg: iteration cap reached without convergence");
}

// Regularized Dirichlet energy on faces; the Lyapunov function of the
// damped iteration when the lower-order term vanishes.
double face_energy(const SampleProblem& sp, const std::vector<double>& u, double eps_reg) {
  std::vector<double> dx, dy;
  nodal_gradient(*sp.grid, u, dx, dy);
  double e = 0.0;
  for (const auto& fp : sp.faces) {
    const auto xi = face_xi(sp, fp, u, dx, dy);
    const double mag2 = xi[0] * xi[0] + xi[1] * xi[1];
    e += fp.ref.weight * (fp.theta / fp.p) * std::pow(mag2 + eps_reg * eps_reg, 0.5 * fp.p);
  }
  return e;
}

// Nonlinear weak-form residual vector over interior hats: one face
// sweep with the true flux plus the nodal lower-order/rhs terms.
void hat_residual_vector(const SampleProblem& sp, const ProblemSpec& spec,
                         const std::vector<double>& u, std::vector<double>& res) {
  std::vector<double> dx, dy;
  nodal_gradient(*sp.grid, u, dx, dy);
  res.assign(sp.n_unknowns, 0.0);
  const int dim = sp.grid->dim;
  for (const auto& fp : sp.faces) {
    const auto& fr = fp.ref;
    KernelArgs a;
    a.dim = dim;
    a.x = fp.x;
    a.y = fp.y;
    a.t = sp.t;
    a.s = 0.5 * (u[fr.node_lo] + u[fr.node_hi]);
    a.theta = fp.theta;
    a.p = fp.p;
    a.xi = face_xi(sp, fp, u, dx, dy);
    const auto flux = spec.A(a);
    const double contrib = fp.ref.weight * flux[fr.axis] * fr.inv_h;
    const int ul = sp.unknown_of_node[fr.node_lo];
    const int uh = sp.unknown_of_node[fr.node_hi];
    if (uh >= 0) res[uh] += contrib;
    if (ul >= 0) res[ul] -= contrib;
  }
  std::vector<double> a0;
  lower_order_term(sp, spec, u, a0);
  for (int k = 0; k < sp.n_unknowns; ++k) {
    const int node = sp.node_of_unknown[k];
    res[k] += sp.grid->quad_weights[node] * (a0[node] - sp.f[node]);
  }
}

// Luxemburg norm of a sparse nonnegative sample-local function given as
// (quad weight * theta, value, exponent) triples.
double sparse_local_norm(const std::vector<std::array<double, 3>>& entries) {
  double rho1 = 0.0;
  for (const auto& e : entries) rho1 += e[0] * std::pow(e[1], e[2]);
  if (rho1 == 0.0) return 0.0;
  auto rho = [&](double inv_lambda) {
    double v = 0.0;
    for (const auto& e : entries) v += e[0] * std::pow(e[1] * inv_lambda, e[2]);
    return v;
  };
  double lam = std::max(1.0, rho1);
  double lo = lam, hi = lam;
  if (rho(1.0 / lam) > 1.0) {
    while (rho(1.0 / hi) > 1.0) hi *= 2.0;
    lo = hi * 0.5;
  } else {
    while (rho(1.0 / lo) < 1.0 && lo > 1e-300) lo *= 0.5;
    hi = lo * 2.0;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double r = rho(1.0 / mid);
    if (std::abs(r - 1.0) <= 1e-12 || hi - lo <= 1e-14 * mid) return mid;
    (r > 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// 1 + ||grad hat_i||_{p,theta} on the sample-local measure, for every
// interior node. The hat's nodal gradient touches only rows adjacent to
// its node plus the one-sided boundary rows within reach.
std::vector<double> hat_denominators(const SampleProblem& sp) {
  const auto& g = *sp.grid;
  std::vector<double> out(sp.n_unknowns, 1.0);

  auto axis_rows = [&](int i, int count) {
    std::vector<int> rows;
    for (int r : {i - 1, i, i + 1}) {
      if (r >= 0 && r < count) rows.push_back(r);
    }
    if (i <= 2) rows.push_back(0);
    if (i >= count - 3) rows.push_back(count - 1);
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    return rows;
  };
  // Stencil weight of value at node i in the derivative at row r.
  auto stencil_at = [](int r, int i, int count, double h) -> double {
    const double inv2h = 1.0 / (2.0 * h);
    if (r == 0) {
      if (i == 0) return -3.0 * inv2h;
      if (i == 1) return 4.0 * inv2h;
      if (i == 2) return -1.0 * inv2h;
      return 0.0;
    }
    if (r == count - 1) {
      if (i == count - 1) return 3.0 * inv2h;
      if (i == count - 2) return -4.0 * inv2h;
      if (i == count - 3) return 1.0 * inv2h;
      return 0.0;
    }
    if (i == r + 1) return inv2h;
    if (i == r - 1) return -inv2h;
    return 0.0;
  };

  for (int k = 0; k < sp.n_unknowns; ++k) {
    const int node = sp.node_of_unknown[k];
    const int ix = node / g.ny();
    const int iy = node % g.ny();
    std::vector<std::array<double, 3>> entries;
    if (g.dim == 1) {
      for (int r : axis_rows(ix, g.nx())) {
        const double d = stencil_at(r, ix, g.nx(), g.h[0]);
        if (d != 0.0)
          entries.push_back({g.quad_weights[r] * sp.theta[r], std::abs(d), sp.pexp[r]});
      }
    } else {
      // d/dx varies along x at fixed iy; d/dy along y at fixed ix. The
      // two components live on disjoint rows except at the node itself,
      // where the central weights vanish anyway.
      for (int r : axis_rows(ix, g.nx())) {
        const double d = stencil_at(r, ix, g.nx(), g.h[0]);
        const int row_node = g.index(r, iy);
        if (d != 0.0)
          entries.push_back(
              {g.quad_weights[row_node] * sp.theta[row_node], std::abs(d), sp.pexp[row_node]});
      }
      for (int r : axis_rows(iy, g.ny())) {
        const double d = stencil_at(r, iy, g.ny(), g.h[1]);
        const int row_node = g.index(ix, r);
        if (d != 0.0)
          entries.push_back(
              {g.quad_weights[row_node] * sp.theta[row_node], std::abs(d), sp.pexp[row_node]});
      }
    }
    out[k] = 1.0 + sparse_local_norm(entries);
  }
  return out;
}

double sample_weak_residual(const SampleProblem& sp, const ProblemSpec& spec,
                            const std::vector<double>& u, const std::vector<double>& denoms,
                            int panel_modes) {
  std::vector<double> res;
  hat_residual_vector(sp, spec, u, res);
  double worst = 0.0;
  for (int k = 0; k < sp.n_unknowns; ++k)
    worst = std::max(worst, std::abs(res[k]) / denoms[k]);

  // Sine modes are nodal combinations of the hats: phi = sum phi_i hat_i,
  // so the raw defect is the same weighted sum of hat defects.
  const auto& g = *sp.grid;
  for (int kx = 1; kx <= panel_modes; ++kx) {
    for (int ky = 1; ky <= (g.dim == 2 ? panel_modes : 1); ++ky) {
      double defect = 0.0;
      std::vector<std::array<double, 3>> grad_entries;
      std::vector<double> phi(u.size(), 0.0);
      for (int node = 0; node < static_cast<int>(u.size()); ++node) {
        const auto c = g.coords(node);
        const double sx = (c[0] - g.bounds[0].first) / (g.bounds[0].second - g.bounds[0].first);
        double v = std::sin(kx * std::numbers::pi * sx);
        if (g.dim == 2) {
          const double sy = (c[1] - g.bounds[1].first) / (g.bounds[1].second - g.bounds[1].first);
          v *= std::sin(ky * std::numbers::pi * sy);
        }
        phi[node] = v;
      }
      for (int k = 0; k < sp.n_unknowns; ++k) defect += phi[sp.node_of_unknown[k]] * res[k];
      std::vector<double> dx, dy;
      nodal_gradient(g, phi, dx, dy);
      for (int node = 0; node < static_cast<int>(u.size()); ++node) {
        const double mag =
            g.dim == 2 ? std::hypot(dx[node], dy[node]) : std::abs(dx[node]);
        grad_entries.push_back({g.quad_weights[node] * sp.theta[node], mag, sp.pexp[node]});
      }
      const double denom = 1.0 + sparse_local_norm(grad_entries);
      worst = std::max(worst, std::abs(defect) / denom);
    }
  }
  return worst;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

double max_abs(const std::vector<double>& a) {
  double d = 0.0;
  for (double v : a) d = std::max(d, std::abs(v));
  return d;
}

}  // namespace

SampleSolve solve_sample(const ProblemSpec& spec, const ExponentField& p, const WeightField& w,
                         const ProductMeasureGrid& m, int t_index, const SolveConfig& cfg,
                         const std::optional<std::vector<double>>& initial_guess) {
  if (t_index < 0 || t_index >= m.n_samples())
    throw GridError("solve_sample: sample index out of range");
  if (spec.kind != ModelKind::p_laplacian_with_g)
    throw SolveError(
        "solve_sample: the fixed-point solver covers the p-Laplacian model kernel; custom "
        "kernels are probe-only");

  SampleProblem sp = make_sample_problem(p, w, spec.f, m, t_index);
  const int nn = m.n_nodes();

  const bool p_is_two = p.p_minus == 2.0 && p.p_plus == 2.0;
  const double outer_tol = cfg.outer_tol > 0.0 ? cfg.outer_tol : (p_is_two ? 1e-8 : 1e-6);
  const double base_damping =
      cfg.damping > 0.0 ? cfg.damping : (p.p_minus >= 1.8 && p.p_plus <= 2.5 ? 1.0 : 0.5);

  SampleSolve out;
  out.u.assign(nn, 0.0);

  // Initial guess: the p = 2 problem with the same weight and datum,
  // unless the caller supplies one.
  std::vector<double> coef(sp.faces.size());
  for (std::size_t i = 0; i < sp.faces.size(); ++i) coef[i] = sp.faces[i].theta;
  std::vector<double> rhs(sp.n_unknowns);
  for (int k = 0; k < sp.n_unknowns; ++k) {
    const int node = sp.node_of_unknown[k];
    rhs[k] = m.grid.quad_weights[node] * sp.f[node];
  }
  std::vector<double> x(sp.n_unknowns, 0.0);
  if (initial_guess) {
    if (static_cast<int>(initial_guess->size()) != nn)
      throw GridError("solve_sample: initial guess size does not match grid");
    for (int k = 0; k < sp.n_unknowns; ++k) x[k] = (*initial_guess)[sp.node_of_unknown[k]];
  } else {
    out.pcg_iterations_total += pcg_solve(sp, coef, rhs, x, cfg.lin_tol);
  }
  for (int k = 0; k < sp.n_unknowns; ++k) out.u[sp.node_of_unknown[k]] = x[k];

  const std::vector<double> denoms = hat_denominators(sp);
  std::deque<std::vector<double>> history;
  auto push_history = [&](const std::vector<double>& u) {
    history.push_back(u);
    if (history.size() > 8) history.pop_front();
  };
  push_history(out.u);

  double energy = face_energy(sp, out.u, cfg.eps_reg);
  out.energy_history.push_back(energy);

  std::vector<double> a0(nn), candidate(nn);
  for (int outer = 0; outer < cfg.max_outer; ++outer) {
    ++out.outer_iterations;
    frozen_coefficients(sp, out.u, cfg.eps_reg, coef);
    lower_order_term(sp, spec, out.u, a0);
    for (int k = 0; k < sp.n_unknowns; ++k) {
      const int node = sp.node_of_unknown[k];
      rhs[k] = m.grid.quad_weights[node] * (sp.f[node] - a0[node]);
    }
    for (int k = 0; k < sp.n_unknowns; ++k) x[k] = out.u[sp.node_of_unknown[k]];
    out.pcg_iterations_total += pcg_solve(sp, coef, rhs, x, cfg.lin_tol);

    double damping = base_damping;
    double new_energy = 0.0;
    for (int halving = 0;; ++halving) {
      candidate = out.u;
      for (int k = 0; k < sp.n_unknowns; ++k) {
        const int node = sp.node_of_unknown[k];
        candidate[node] = out.u[node] + damping * (x[k] - out.u[node]);
      }
      new_energy = face_energy(sp, candidate, cfg.eps_reg);
      if (!cfg.g_zero || new_energy <= energy + 1e-12 * std::max(1.0, std::abs(energy)) ||
          halving >= 6)
        break;
      damping *= 0.5;
    }

    const double delta = max_abs_diff(candidate, out.u);
    const double scale = std::max(1.0, max_abs(out.u));
    out.u = candidate;
    energy = new_energy;
    out.energy_history.push_back(energy);
    push_history(out.u);

    if (delta <= outer_tol * scale) {
      out.weak_residual = sample_weak_residual(sp, spec, out.u, denoms, cfg.panel_modes);
      if (out.weak_residual <= outer_tol) {
        out.converged = true;
        break;
      }
    }
  }

  if (!out.converged) {
    out.weak_residual = sample_weak_residual(sp, spec, out.u, denoms, cfg.panel_modes);
    out.failure = "no convergence in " + std::to_string(cfg.max_outer) +
                  " outer iterations (residual " + std::to_string(out.weak_residual) + ")";
  }
  out.iterate_history.assign(history.begin(), history.end());
  return out;
}

double weak_residual(const StochasticField& u, const ProblemSpec& spec, const ExponentField& p,
                     const WeightField& w, const ProductMeasureGrid& m, int panel_modes) {
  // Probability-weighted hat defects summed over samples, normalized by
  // the product-measure norm of the hat gradient.
  const int ns = m.n_samples();
  std::vector<SampleProblem> sps;
  sps.reserve(ns);
  for (int j = 0; j < ns; ++j) sps.push_back(make_sample_problem(p, w, spec.f, m, j));

  std::vector<std::vector<double>> res(ns);
  for (int j = 0; j < ns; ++j) {
    std::vector<double> uj(u.data.sample_slice(j).begin(), u.data.sample_slice(j).end());
    hat_residual_vector(sps[j], spec, uj, res[j]);
  }

  const auto& g = m.grid;
  double worst = 0.0;
  // Hat denominators over the full product measure: sample-local sparse
  // entries scaled by the sample probabilities.
  {
    const SampleProblem& sp0 = sps[0];
    for (int k = 0; k < sp0.n_unknowns; ++k) {
      double defect = 0.0;
      for (int j = 0; j < ns; ++j) defect += m.omega.probs[j] * res[j][k];
      const int node = sp0.node_of_unknown[k];
      const int ix = node / g.ny();
      const int iy = node % g.ny();
      std::vector<std::array<double, 3>> entries;
      auto add_axis = [&](int i, int count, double h, bool is_x) {
        auto rows = std::vector<int>{};
        for (int r : {i - 1, i, i + 1})
          if (r >= 0 && r < count) rows.push_back(r);
        if (i <= 2) rows.push_back(0);
        if (i >= count - 3) rows.push_back(count - 1);
        std::sort(rows.begin(), rows.end());
        rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
        const double inv2h = 1.0 / (2.0 * h);
        for (int r : rows) {
          double d = 0.0;
          if (r == 0)
            d = (i == 0 ? -3.0 : i == 1 ? 4.0 : i == 2 ? -1.0 : 0.0) * inv2h;
          else if (r == count - 1)
            d = (i == count - 1 ? 3.0 : i == count - 2 ? -4.0 : i == count - 3 ? 1.0 : 0.0) *
                inv2h;
          else if (i == r + 1)
            d = inv2h;
          else if (i == r - 1)
            d = -inv2h;
          if (d == 0.0) continue;
          const int row_node = g.dim == 1 ? r : (is_x ? g.index(r, iy) : g.index(ix, r));
          for (int j = 0; j < ns; ++j)
            entries.push_back({m.omega.probs[j] * g.quad_weights[row_node] *
                                   w.data.at(row_node, j),
                               std::abs(d), p.data.at(row_node, j)});
        }
      };
      add_axis(ix, g.nx(), g.h[0], true);
      if (g.dim == 2) add_axis(iy, g.ny(), g.h[1], false);
      const double denom = 1.0 + sparse_local_norm(entries);
      worst = std::max(worst, std::abs(defect) / denom);
    }
  }

  // Tensor sine modes via the public pairing; phi vanishes on the
  // boundary by construction.
  for (int kx = 1; kx <= panel_modes; ++kx) {
    for (int ky = 1; ky <= (g.dim == 2 ? panel_modes : 1); ++ky) {
      auto mode = make_stochastic_field(
          m,
          [&](double x, double y, double) {
            const double sx = (x - g.bounds[0].first) / (g.bounds[0].second - g.bounds[0].first);
            double v = std::sin(kx * std::numbers::pi * sx);
            if (g.dim == 2) {
              const double sy =
                  (y - g.bounds[1].first) / (g.bounds[1].second - g.bounds[1].first);
              v *= std::sin(ky * std::numbers::pi * sy);
            }
            return v;
          },
          false);
      // Snap to exact zeros on the boundary (sin of the endpoints).
      StochasticField phi = apply_zero_boundary(m, std::move(mode.data));
      const OperatorPairing pr = pairing(u, phi, spec, p, w, m);
      Field fphi(m.n_nodes(), ns);
      for (std::size_t i = 0; i < fphi.values.size(); ++i)
        fphi.values[i] = spec.f.data.values[i] * phi.data.values[i];
      const double defect = pr.total - integrate(fphi, m);
      const double denom = 1.0 + w0_seminorm(phi, p, w, m);
      worst = std::max(worst, std::abs(defect) / denom);
    }
  }
  return worst;
}

double weak_residual(const StochasticField& u, const ProblemSpec& spec, const ExponentField& p,
                     const WeightField& w, const ProductMeasureGrid& m,
                     const std::vector<StochasticField>& panel) {
  if (panel.empty()) throw DomainError("weak_residual: empty test panel");
  double worst = 0.0;
  for (const auto& phi : panel) {
    if (!phi.zero_boundary)
      throw DomainError("weak_residual: panel fields must vanish on the boundary");
    const OperatorPairing pr = pairing(u, phi, spec, p, w, m);
    Field fphi(m.n_nodes(), m.n_samples());
    for (std::size_t i = 0; i < fphi.values.size(); ++i)
      fphi.values[i] = spec.f.data.values[i] * phi.data.values[i];
    const double defect = pr.total - integrate(fphi, m);
    const double denom = 1.0 + w0_seminorm(phi, p, w, m);
    worst = std::max(worst, std::abs(defect) / denom);
  }
  return worst;
}

SolveReport solve_ensemble(const ProblemSpec& spec, const ExponentField& p, const WeightField& w,
                           const ProductMeasureGrid& m, const SolveConfig& cfg) {
  SolveReport rep;
  const int ns = m.n_samples();
  rep.samples.resize(ns);
  parallel_for(ns, [&](std::size_t j) {
    rep.samples[j] = solve_sample(spec, p, w, m, static_cast<int>(j), cfg);
  });

  Field all(m.n_nodes(), ns);
  rep.ok = true;
  for (int j = 0; j < ns; ++j) {
    const auto& s = rep.samples[j];
    rep.ok = rep.ok && s.converged;
    rep.residual_max = std::max(rep.residual_max, s.weak_residual);
    for (int node = 0; node < m.n_nodes(); ++node) all.at(node, j) = s.u[node];
  }
  rep.solution = StochasticField{all, true};

  rep.mean = Field(m.n_nodes(), 1);
  rep.stddev = Field(m.n_nodes(), 1);
  for (int node = 0; node < m.n_nodes(); ++node) {
    double mu = 0.0;
    for (int j = 0; j < ns; ++j) mu += m.omega.probs[j] * all.at(node, j);
    double var = 0.0;
    for (int j = 0; j < ns; ++j) {
      const double d = all.at(node, j) - mu;
      var += m.omega.probs[j] * d * d;
    }
    rep.mean.at(node, 0) = mu;
    rep.stddev.at(node, 0) = std::sqrt(std::max(var, 0.0));
  }
  if (rep.ok) rep.ensemble_residual = weak_residual(rep.solution, spec, p, w, m, cfg.panel_modes);
  return rep;
}

RefineStudy refine_study(const LevelBuilder& build, const std::vector<int>& base_n, int levels,
                         const SolveConfig& cfg, const std::optional<SpaceSampleFn>& exact) {
  if (levels < 2) throw DomainError("refine_study: need at least two levels");

  RefineStudy study;
  std::vector<SolveReport> reports;
  std::vector<std::vector<int>> level_n;
  for (int lvl = 0; lvl < levels; ++lvl) {
    std::vector<int> n;
    for (int v : base_n) n.push_back((v - 1) * (1 << lvl) + 1);
    level_n.push_back(n);
    SolveInputs in = build(n);
    SolveReport r = solve_ensemble(in.spec, in.p, in.w, in.m, cfg);
    if (!r.ok) throw SolveError("refine_study: level " + std::to_string(lvl) + " did not converge");

    RefineRow row;
    row.n = n;
    if (exact) {
      double err = 0.0;
      for (int j = 0; j < in.m.n_samples(); ++j) {
        const double t = in.m.omega.samples[j];
        for (int node = 0; node < in.m.n_nodes(); ++node) {
          const auto c = in.m.grid.coords(node);
          err = std::max(err, std::abs(r.solution.data.at(node, j) - (*exact)(c[0], c[1], t)));
        }
      }
      row.err_exact = err;
    }
    if (lvl > 0) {
      const auto& prev = reports.back();
      const auto& gc = level_n[lvl - 1];
      double d = 0.0;
      // Coarse node (i,j) coincides with fine node (2i, 2j).
      const int cny = base_n.size() == 2 ? gc[1] : 1;
      const int fny = base_n.size() == 2 ? n[1] : 1;
      for (int j = 0; j < in.m.n_samples(); ++j) {
        for (int ci = 0; ci < gc[0]; ++ci) {
          for (int cj = 0; cj < cny; ++cj) {
            const int coarse = ci * cny + cj;
            const int fine = (2 * ci) * fny + 2 * cj;
            d = std::max(d, std::abs(prev.solution.data.at(coarse, j) -
                                     r.solution.data.at(fine, j)));
          }
        }
      }
      row.diff_sup = d;
    }
    study.rows.push_back(row);
    reports.push_back(std::move(r));
  }

  // Fitted order from successive quantities: analytic errors when a
  // reference is available, otherwise solution differences.
  std::vector<double> seq;
  for (std::size_t i = 0; i < study.rows.size(); ++i) {
    if (exact)
      seq.push_back(study.rows[i].err_exact);
    else if (i > 0)
      seq.push_back(study.rows[i].diff_sup);
  }
  const double noise = 100.0 * std::max(cfg.lin_tol, 1e-14);
  study.exact_to_roundoff = !seq.empty() && seq.back() <= noise && seq.front() <= noise;
  double sum = 0.0;
  int cnt = 0;
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    if (seq[i] > noise && seq[i + 1] > noise) {
      sum += std::log2(seq[i] / seq[i + 1]);
      cnt += 1;
    }
  }
  study.fitted_order = cnt > 0 ? sum / cnt : (study.exact_to_roundoff ? 99.0 : 0.0);
  for (std::size_t i = 1; i < study.rows.size(); ++i) {
    if (exact && study.rows[i - 1].err_exact > noise && study.rows[i].err_exact > noise)
      study.rows[i].order = std::log2(study.rows[i - 1].err_exact / study.rows[i].err_exact);
    else if (!exact && i >= 2 && study.rows[i - 1].diff_sup > noise &&
             study.rows[i].diff_sup > noise)
      study.rows[i].order = std::log2(study.rows[i - 1].diff_sup / study.rows[i].diff_sup);
  }
  return study;
}

}  // namespace varex
