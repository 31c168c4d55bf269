#pragma once

// Heat semigroup of Delta_eps on the compact Heisenberg nilmanifold,
// discretized on a twisted-periodic grid, plus the closed-form spectrum of
// Delta_eps on SU(2).
//
// The quotient identifications are exact at the index level: crossing the
// x-boundary maps (x,y,z) -> (x-1, y, z-y), i.e. k <- k - j mod N, which is a
// bijection of the index set because all three axes share the spacing 1/N.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace folia::heat {

using Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

struct NilGrid {
  int N = 0;
  double h = 0.0;

  int size() const { return N * N * N; }

  // Canonical flat index of possibly out-of-range (i,j,k), applying the
  // twist rule on every x-wrap.
  int index(int i, int j, int k) const {
    while (i >= N) {
      i -= N;
      k -= j;
    }
    while (i < 0) {
      i += N;
      k += j;
    }
    j %= N;
    if (j < 0) j += N;
    k %= N;
    if (k < 0) k += N;
    return (i * N + j) * N + k;
  }

  void coords(int idx, int& i, int& j, int& k) const {
    k = idx % N;
    j = (idx / N) % N;
    i = idx / (N * N);
  }
};

struct Field {
  const NilGrid* grid = nullptr;
  VectorXd values;

  double mass() const {
    double h3 = grid->h * grid->h * grid->h;
    return values.sum() * h3;
  }
};

struct GeneratorMatrix {
  SparseMatrix L;
  double eps = 0.0;
  double max_diag = 0.0;  // max |diagonal|, used for the explicit-Euler step bound
};

inline NilGrid build_grid(int N) {
  if (N < 4 || N % 2 != 0) throw std::invalid_argument("build_grid: N must be even and >= 4");
  return NilGrid{N, 1.0 / N};
}

// Discretization of Delta_eps = Delta_H + eps Delta_V:
//  - X1 second differences along the x-axis (twisted wrap),
//  - X2 second differences along the flow (x, y +- h, z +- x h), with linear
//    interpolation between the two nearest z-planes,
//  - Z second differences along the z-axis, weighted by eps.
// The raw stencil matrix is symmetrized as (A + A^T)/2 and the diagonal is
// set to the negated off-diagonal row sum, so rows sum to zero exactly and
// the operator is self-adjoint for uniform grid weights.
inline GeneratorMatrix assemble_generator(const NilGrid& grid, double eps) {
  if (eps < 0.0) throw std::invalid_argument("assemble_generator: eps must be >= 0");
  const int N = grid.N;
  const double ih2 = 1.0 / (grid.h * grid.h);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(grid.size()) * 10);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        const int row = grid.index(i, j, k);
        // X1
        trips.emplace_back(row, grid.index(i + 1, j, k), ih2);
        trips.emplace_back(row, grid.index(i - 1, j, k), ih2);
        // X2 flow: z-offset x*h = i*h^2, i.e. theta = i/N plane fractions.
        const double theta = static_cast<double>(i) / N;
        trips.emplace_back(row, grid.index(i, j + 1, k), (1.0 - theta) * ih2);
        trips.emplace_back(row, grid.index(i, j + 1, k + 1), theta * ih2);
        trips.emplace_back(row, grid.index(i, j - 1, k), (1.0 - theta) * ih2);
        trips.emplace_back(row, grid.index(i, j - 1, k - 1), theta * ih2);
        // Z
        if (eps > 0.0) {
          trips.emplace_back(row, grid.index(i, j, k + 1), eps * ih2);
          trips.emplace_back(row, grid.index(i, j, k - 1), eps * ih2);
        }
      }
  SparseMatrix A(grid.size(), grid.size());
  A.setFromTriplets(trips.begin(), trips.end());
  SparseMatrix At = SparseMatrix(A.transpose());
  SparseMatrix L = 0.5 * (A + At);
  // Diagonal = -(off-diagonal row sum): conservation is exact by construction.
  VectorXd diag = VectorXd::Zero(grid.size());
  for (int c = 0; c < L.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(L, c); it; ++it)
      if (it.row() != it.col()) diag[it.row()] += it.value();
  std::vector<Eigen::Triplet<double>> dt;
  dt.reserve(grid.size());
  for (int r = 0; r < grid.size(); ++r) dt.emplace_back(r, r, -diag[r]);
  SparseMatrix D(grid.size(), grid.size());
  D.setFromTriplets(dt.begin(), dt.end());
  GeneratorMatrix G;
  G.L = L + D;
  G.L.prune(0.0);
  G.L.makeCompressed();
  G.eps = eps;
  G.max_diag = diag.maxCoeff();
  return G;
}

enum class Scheme { ExplicitEuler, CrankNicolson };

// Approximates exp(t L) f. Explicit Euler uses dt = 0.9 / max|diag|, which
// keeps I + dt L a nonnegative matrix with unit row sums (a stochastic
// matrix), so positivity and Jensen-type pointwise inequalities transfer
// exactly to the discrete semigroup. Crank-Nicolson is second order and is
// used where accuracy against the matrix exponential matters.
inline Field evolve(const Field& f, const GeneratorMatrix& G, double t,
                    Scheme scheme = Scheme::ExplicitEuler, int min_steps = 1) {
  if (t < 0.0) throw std::invalid_argument("evolve: t must be >= 0");
  Field out = f;
  if (t == 0.0) return out;
  if (scheme == Scheme::ExplicitEuler) {
    const double dt_max = 0.9 / G.max_diag;
    const int steps = std::max(min_steps, static_cast<int>(std::ceil(t / dt_max)));
    const double dt = t / steps;
    for (int s = 0; s < steps; ++s) {
      out.values += dt * (G.L * out.values);
      if (!out.values.allFinite() || out.values.cwiseAbs().maxCoeff() > 1e12)
        throw std::runtime_error("evolve: instability detected (value blow-up)");
    }
  } else {
    // dt chosen so dt * max|diag| <= 0.05; second-order accurate in dt.
    const int steps = std::max(min_steps, static_cast<int>(std::ceil(t * G.max_diag / 0.05)));
    const double dt = t / steps;
    SparseMatrix I(G.L.rows(), G.L.cols());
    I.setIdentity();
    SparseMatrix lhs = I - (0.5 * dt) * G.L;
    SparseMatrix rhs = I + (0.5 * dt) * G.L;
    Eigen::SimplicialLDLT<SparseMatrix> solver;
    solver.compute(lhs);
    if (solver.info() != Eigen::Success)
      throw std::runtime_error("evolve: Crank-Nicolson factorization failed");
    for (int s = 0; s < steps; ++s) out.values = solver.solve(rhs * out.values);
  }
  return out;
}

// Heat kernel density p_t(., x0) with respect to the normalized volume:
// evolution of N^3 * delta_{x0}, rescaled so the discrete integral is one.
inline Field heat_kernel(const NilGrid& grid, const GeneratorMatrix& G, double t, int x0,
                         Scheme scheme = Scheme::ExplicitEuler) {
  if (t <= 0.0) throw std::invalid_argument("heat_kernel: t must be positive");
  Field f{&grid, VectorXd::Zero(grid.size())};
  f.values[x0] = static_cast<double>(grid.size());
  Field p = evolve(f, G, t, scheme);
  p.values /= p.mass();
  return p;
}

namespace detail {

// Conjugate gradient for the consistent singular system (-L) x = b on the
// mean-zero subspace.
inline VectorXd cg_solve_neg(const SparseMatrix& L, const VectorXd& b, double tol, int max_iter) {
  const int n = static_cast<int>(b.size());
  auto project = [n](VectorXd& v) { v.array() -= v.mean(); };
  VectorXd x = VectorXd::Zero(n);
  VectorXd r = b;
  project(r);
  VectorXd p = r;
  double rs = r.squaredNorm();
  const double target = tol * tol * rs;
  for (int it = 0; it < max_iter && rs > target; ++it) {
    VectorXd Ap = -(L * p);
    project(Ap);
    double alpha = rs / p.dot(Ap);
    x += alpha * p;
    r -= alpha * Ap;
    double rs_new = r.squaredNorm();
    p = r + (rs_new / rs) * p;
    rs = rs_new;
  }
  project(x);
  return x;
}

}  // namespace detail

struct SpectralGapResult {
  double lambda1 = 0.0;
  double residual = 0.0;
  VectorXd eigenvector;
};

// Smallest nonzero eigenvalue of -L. Dense solve for small grids, inverse
// iteration (CG inner solves, constants deflated) above.
inline SpectralGapResult spectral_gap(const GeneratorMatrix& G, int dense_limit = 1729) {
  const int n = static_cast<int>(G.L.rows());
  SpectralGapResult out;
  if (n <= dense_limit) {
    Eigen::MatrixXd dense = -Eigen::MatrixXd(G.L);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    out.lambda1 = es.eigenvalues()[1];
    out.eigenvector = es.eigenvectors().col(1);
  } else {
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = u(rng);
    x.array() -= x.mean();
    x.normalize();
    double lambda = 0.0;
    for (int it = 0; it < 200; ++it) {
      VectorXd y = detail::cg_solve_neg(G.L, x, 1e-12, 4 * n);
      y.normalize();
      lambda = y.dot(-(G.L * y));
      double res = (-(G.L * y) - lambda * y).norm();
      x = y;
      if (res < 1e-9) break;
    }
    out.lambda1 = lambda;
    out.eigenvector = x;
  }
  out.residual = (-(G.L * out.eigenvector) - out.lambda1 * out.eigenvector).norm();
  return out;
}

// ---------------------------------------------------------------------------
// SU(2) closed-form spectrum
// ---------------------------------------------------------------------------

struct SpectralLine {
  double j = 0.0;       // spin (half-integer)
  double k = 0.0;       // vertical weight, -j..j
  double eigenvalue = 0.0;  // of -Delta_eps
  int multiplicity = 0;
};

// Eigenvalues of -Delta_eps on SU(2) with the frame normalization
// [X1,X2] = 2Z: on matrix coefficients of the spin-j representation with
// vertical weight k, -Delta_eps = 4 j(j+1) - 4 k^2 + 4 eps k^2, each line
// carrying multiplicity 2j+1.
inline std::vector<SpectralLine> su2_spectrum(double eps, double jmax) {
  if (eps <= 0.0) throw std::invalid_argument("su2_spectrum: eps must be positive");
  if (jmax < 0.0 || jmax > 50.0) throw std::invalid_argument("su2_spectrum: jmax out of range");
  std::vector<SpectralLine> lines;
  for (double j = 0.0; j <= jmax + 1e-12; j += 0.5) {
    for (double k = -j; k <= j + 1e-12; k += 1.0) {
      SpectralLine s;
      s.j = j;
      s.k = k;
      s.eigenvalue = 4.0 * j * (j + 1.0) - 4.0 * k * k + 4.0 * eps * k * k;
      s.multiplicity = static_cast<int>(std::lround(2.0 * j + 1.0));
      lines.push_back(s);
    }
  }
  std::sort(lines.begin(), lines.end(),
            [](const SpectralLine& a, const SpectralLine& b) { return a.eigenvalue < b.eigenvalue; });
  return lines;
}

inline double su2_spectral_gap(double eps, double jmax = 10.0) {
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& s : su2_spectrum(eps, jmax))
    if (s.eigenvalue > 1e-12) gap = std::min(gap, s.eigenvalue);
  return gap;
}

}  // namespace folia::heat
