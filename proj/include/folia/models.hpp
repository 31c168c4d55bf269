#pragma once

// Model foliations given by Lie-algebra structure constants together with a
// coordinate realization of the orthonormal frame. All curvature objects
// (Levi-Civita and Bott connections, torsion, J-maps, Ricci tensors) are
// computed by frame algebra on the structure constants; the chart realization
// is consumed by the pointwise calculus only.

#include <Eigen/Dense>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "folia/expr.hpp"
#include "folia/jet.hpp"

namespace folia::models {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Structure constants c^a_{bc} with [e_b,e_c] = sum_a c^a_{bc} e_a over the
// full orthonormal frame, first n entries horizontal, last m vertical.
struct FoliationModel {
  std::string name;
  int n = 0;  // horizontal dimension
  int m = 0;  // vertical dimension
  std::vector<MatrixXd> c;  // c[a](b,cc)
  bool has_quotient = false;

  // Coordinate realization: jets of the coefficient functions of frame field
  // `a` in the chart basis, at chart point p, to the requested order.
  std::function<std::vector<Jet>(int a, const VectorXd& p, int order)> frame;
  // Random chart point inside the valid region.
  std::function<VectorXd(std::mt19937&)> sample_point;

  int dim() const { return n + m; }
};

// Connection coefficients Gamma[a](b,cc) = <nabla_{e_a} e_b, e_cc> in an
// orthonormal frame.
struct ConnectionCoeffs {
  std::vector<MatrixXd> gamma;
  int dim() const { return static_cast<int>(gamma.size()); }
};

struct CurvaturePack {
  MatrixXd ricH;               // n x n
  MatrixXd ricV;               // m x m
  std::vector<MatrixXd> torsion;  // torsion[l](i,j) = T^{n+l}_{ij}
  std::vector<MatrixXd> J;     // J[l]: column action of J_{Z_l} on H
  MatrixXd J2;                 // sum_l J_l J_l
  MatrixXd M2;                 // M2(l,k) = -1/4 Tr(J_l J_k)
};

struct CurvatureConstants {
  double rho1 = 0.0;  // min eigenvalue of RicH
  double kappa = 0.0; // max eigenvalue of -J2
  double rho2 = 0.0;  // min eigenvalue of M2
  double rho3 = 0.0;  // min eigenvalue of RicV
};

struct ValidationReport {
  bool antisymmetry_ok = false;
  double antisymmetry_residual = 0.0;
  bool jacobi_ok = false;
  double jacobi_residual = 0.0;
  bool vertical_integrability_ok = false;
  double vertical_integrability_residual = 0.0;
  int bracket_generating_step = 0;  // 0 when H never spans
  bool bracket_generating_ok = false;
  bool totally_geodesic_ok = false;
  double totally_geodesic_residual = 0.0;
  bool bundle_like_ok = false;
  double bundle_like_residual = 0.0;
  bool yang_mills_ok = false;
  double yang_mills_residual = 0.0;
  bool chart_ok = false;
  double chart_residual = 0.0;

  bool all_ok() const {
    return antisymmetry_ok && jacobi_ok && vertical_integrability_ok && bracket_generating_ok &&
           totally_geodesic_ok && bundle_like_ok && yang_mills_ok && chart_ok;
  }
};

// ---------------------------------------------------------------------------
// Built-in catalog
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<MatrixXd> zero_constants(int d) {
  return std::vector<MatrixXd>(d, MatrixXd::Zero(d, d));
}

// Sets c^a_{bc} = v and c^a_{cb} = -v.
inline void set_bracket(std::vector<MatrixXd>& c, int a, int b, int cc, double v) {
  c[a](b, cc) = v;
  c[a](cc, b) = -v;
}

}  // namespace detail

// Polarized Heisenberg group H^1: X1 = dx, X2 = dy + x dz, Z = dz.
inline FoliationModel heisenberg_model() {
  FoliationModel M;
  M.name = "heisenberg";
  M.n = 2;
  M.m = 1;
  M.c = detail::zero_constants(3);
  detail::set_bracket(M.c, 2, 0, 1, 1.0);  // [X1,X2] = Z
  M.has_quotient = true;
  M.frame = [](int a, const VectorXd& p, int order) {
    std::vector<Jet> coeff(3, Jet(3, order, 0.0));
    auto one = Jet(3, order, 1.0);
    switch (a) {
      case 0: coeff[0] = one; break;                                  // X1 = dx
      case 1: coeff[1] = one; coeff[2] = Jet::variable(3, order, 0, p[0]); break;  // X2 = dy + x dz
      case 2: coeff[2] = one; break;                                  // Z = dz
      default: throw std::out_of_range("frame index");
    }
    return coeff;
  };
  M.sample_point = [](std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    VectorXd p(3);
    p << u(rng), u(rng), u(rng);
    return p;
  };
  return M;
}

// SU(2) with left-invariant orthonormal frame normalized by [X1,X2] = 2Z,
// [X2,Z] = 2X1, [Z,X1] = 2X2 (Hopf fibration as the vertical foliation).
// Chart: exponential coordinates of the first kind on a unit ball around the
// identity; sample points stay at radius <= 0.8.
inline FoliationModel su2_model() {
  FoliationModel M;
  M.name = "su2";
  M.n = 2;
  M.m = 1;
  M.c = detail::zero_constants(3);
  detail::set_bracket(M.c, 2, 0, 1, 2.0);  // [X1,X2] = 2Z
  detail::set_bracket(M.c, 0, 1, 2, 2.0);  // [X2,Z] = 2X1
  detail::set_bracket(M.c, 1, 2, 0, 2.0);  // [Z,X1]  = 2X2
  M.frame = [](int a, const VectorXd& p, int order) {
    // Left-invariant field with value xi at identity, pushed to exponential
    // coordinates v: X_xi(v) = xi + v x xi + q(|v|) ((v.xi) v - |v|^2 xi),
    // q(r) = (1 - r cot r)/r^2. Derived from d/dt BCH(v, t xi).
    if (a < 0 || a > 2) throw std::out_of_range("frame index");
    std::vector<Jet> v{Jet::variable(3, order, 0, p[0]), Jet::variable(3, order, 1, p[1]),
                       Jet::variable(3, order, 2, p[2])};
    Jet u = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    if (u.value() < 1e-14) {
      // At the identity the field reduces to the constant frame.
      std::vector<Jet> coeff(3, Jet(3, order, 0.0));
      coeff[a] = Jet(3, order, 1.0);
      if (u.value() > 0) throw std::domain_error("su2 chart: point too close to identity");
      return coeff;
    }
    Jet r = sqrt(u);
    Jet q = (1.0 - r * cos(r) * inv(sin(r))) * inv(u);
    // xi = e_a: constant term, cross product v x e_a, and q ((v.e_a) v - |v|^2 e_a).
    std::vector<Jet> coeff(3, Jet(3, order, 0.0));
    coeff[a] += 1.0;
    int b1 = (a + 1) % 3, b2 = (a + 2) % 3;
    // v x e_a = v_{a+2} e_{a+1} - v_{a+1} e_{a+2} with cyclic indices
    coeff[b1] += v[b2];
    coeff[b2] -= v[b1];
    // q ((v.xi) v - |v|^2 xi)
    for (int i = 0; i < 3; ++i) coeff[i] += q * (v[a] * v[i]);
    coeff[a] -= q * u;
    return coeff;
  };
  M.sample_point = [](std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    VectorXd p(3);
    do {
      p << u(rng), u(rng), u(rng);
    } while (p.norm() > 0.8 || p.norm() < 0.05);
    return p;
  };
  return M;
}

// Abelian R^3 with two horizontal directions; fails bracket generation.
inline FoliationModel abelian_model() {
  FoliationModel M;
  M.name = "abelian";
  M.n = 2;
  M.m = 1;
  M.c = detail::zero_constants(3);
  M.frame = [](int a, const VectorXd&, int order) {
    std::vector<Jet> coeff(3, Jet(3, order, 0.0));
    coeff.at(a) = Jet(3, order, 1.0);
    return coeff;
  };
  M.sample_point = [](std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    VectorXd p(3);
    p << u(rng), u(rng), u(rng);
    return p;
  };
  return M;
}

// ---------------------------------------------------------------------------
// Structure-constant algebra
// ---------------------------------------------------------------------------

namespace detail {

// Frame scale factors of the g_eps orthonormal frame {X_i, sqrt(eps) Z_l}.
inline VectorXd frame_scales(const FoliationModel& M, double eps) {
  VectorXd s = VectorXd::Ones(M.dim());
  for (int a = M.n; a < M.dim(); ++a) s[a] = std::sqrt(eps);
  return s;
}

// Structure constants in the rescaled frame e'_a = s_a e_a:
// [e'_a, e'_b] = sum_c (s_a s_b / s_c) c^c_{ab} e'_c.
inline std::vector<MatrixXd> scaled_constants(const FoliationModel& M, double eps) {
  VectorXd s = frame_scales(M, eps);
  std::vector<MatrixXd> sc(M.dim());
  for (int cc = 0; cc < M.dim(); ++cc) {
    sc[cc] = M.c[cc];
    for (int a = 0; a < M.dim(); ++a)
      for (int b = 0; b < M.dim(); ++b) sc[cc](a, b) *= s[a] * s[b] / s[cc];
  }
  return sc;
}

}  // namespace detail

// Levi-Civita connection of g_eps in its orthonormal frame, by the Koszul
// formula for constant structure constants:
// Gamma_{abc} = 1/2 (C_{abc} - C_{bca} + C_{cab}), C_{abc} = <[e_a,e_b],e_c>.
inline ConnectionCoeffs levi_civita(const FoliationModel& M, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("levi_civita: eps must be positive");
  const int d = M.dim();
  auto C = detail::scaled_constants(M, eps);
  ConnectionCoeffs G;
  G.gamma.assign(d, MatrixXd::Zero(d, d));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int cc = 0; cc < d; ++cc)
        G.gamma[a](b, cc) = 0.5 * (C[cc](a, b) - C[a](b, cc) + C[b](cc, a));
  return G;
}

// Bott connection in the g-orthonormal frame (four-case formula).
inline ConnectionCoeffs bott_connection(const FoliationModel& M) {
  const int d = M.dim();
  const int n = M.n;
  ConnectionCoeffs D = levi_civita(M, 1.0);
  ConnectionCoeffs G;
  G.gamma.assign(d, MatrixXd::Zero(d, d));
  auto horizontal = [n](int a) { return a < n; };
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int cc = 0; cc < d; ++cc) {
        double v;
        if (horizontal(a) && horizontal(b))
          v = horizontal(cc) ? D.gamma[a](b, cc) : 0.0;  // (D_X Y)_H
        else if (!horizontal(a) && horizontal(b))
          v = horizontal(cc) ? M.c[cc](a, b) : 0.0;      // [Z,X]_H
        else if (horizontal(a) && !horizontal(b))
          v = horizontal(cc) ? 0.0 : M.c[cc](a, b);      // [X,Z]_V
        else
          v = horizontal(cc) ? 0.0 : D.gamma[a](b, cc);  // (D_Z W)_V
        G.gamma[a](b, cc) = v;
      }
  return G;
}

// Curvature R(e_a,e_b)e_c of a constant-coefficient connection:
// <R(e_a,e_b)e_c, e_d> with R(a,b)c = nab_a nab_b c - nab_b nab_a c - nab_{[a,b]} c.
inline double curvature_entry(const ConnectionCoeffs& G, const std::vector<MatrixXd>& c,
                              int a, int b, int cc, int d) {
  const int dim = G.dim();
  double r = 0.0;
  for (int e = 0; e < dim; ++e) {
    r += G.gamma[b](cc, e) * G.gamma[a](e, d);
    r -= G.gamma[a](cc, e) * G.gamma[b](e, d);
    r -= c[e](a, b) * G.gamma[e](cc, d);
  }
  return r;
}

inline CurvaturePack torsion_and_j(const FoliationModel& M) {
  CurvaturePack P;
  const int n = M.n, m = M.m;
  P.torsion.assign(m, MatrixXd::Zero(n, n));
  P.J.assign(m, MatrixXd::Zero(n, n));
  for (int l = 0; l < m; ++l) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        P.torsion[l](i, j) = -M.c[n + l](i, j);  // T(X_i,X_j) = -[X_i,X_j]_V
        // <J_l X_i, X_j> = g_V(Z_l, T(X_i,X_j)) = -c^{n+l}_{ij}; as a
        // column-action matrix this is J[l](j,i) = -c^{n+l}_{ij}, i.e. J[l] = c^{n+l}.
      }
    P.J[l] = M.c[n + l].topLeftCorner(n, n);
  }
  P.J2 = MatrixXd::Zero(n, n);
  for (int l = 0; l < m; ++l) P.J2 += P.J[l] * P.J[l];
  P.M2 = MatrixXd::Zero(m, m);
  for (int l = 0; l < m; ++l)
    for (int k = 0; k < m; ++k) P.M2(l, k) = -0.25 * (P.J[l] * P.J[k]).trace();
  return P;
}

inline CurvaturePack curvatures(const FoliationModel& M) {
  CurvaturePack P = torsion_and_j(M);
  const int n = M.n, m = M.m;
  ConnectionCoeffs B = bott_connection(M);
  P.ricH = MatrixXd::Zero(n, n);
  for (int b = 0; b < n; ++b)
    for (int cc = 0; cc < n; ++cc) {
      double r = 0.0;
      for (int a = 0; a < n; ++a) r += curvature_entry(B, M.c, a, b, cc, a);
      P.ricH(b, cc) = r;
    }
  P.ricH = 0.5 * (P.ricH + P.ricH.transpose()).eval();
  P.ricV = MatrixXd::Zero(m, m);
  for (int b = 0; b < m; ++b)
    for (int cc = 0; cc < m; ++cc) {
      double r = 0.0;
      for (int a = 0; a < m; ++a) r += curvature_entry(B, M.c, n + a, n + b, n + cc, n + a);
      P.ricV(b, cc) = r;
    }
  P.ricV = 0.5 * (P.ricV + P.ricV.transpose()).eval();
  return P;
}

// Ricci tensor of g_eps in the g_eps-orthonormal frame {X_i, sqrt(eps) Z_l}.
inline MatrixXd ricci_epsilon(const FoliationModel& M, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("ricci_epsilon: eps must be positive");
  const int d = M.dim();
  ConnectionCoeffs G = levi_civita(M, eps);
  auto C = detail::scaled_constants(M, eps);
  MatrixXd ric = MatrixXd::Zero(d, d);
  for (int b = 0; b < d; ++b)
    for (int cc = 0; cc < d; ++cc) {
      double r = 0.0;
      for (int a = 0; a < d; ++a) r += curvature_entry(G, C, a, b, cc, a);
      ric(b, cc) = r;
    }
  return 0.5 * (ric + ric.transpose()).eval();
}

// Assembly of the closed-form Ricci of g_eps from the foliation data, in the
// same g_eps-orthonormal frame as ricci_epsilon:
//   horizontal block  RicH + (1/2eps) J2
//   mixed block       0
//   vertical block    eps RicV + (1/eps) M2
inline MatrixXd ricci_epsilon_formula(const FoliationModel& M, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("ricci_epsilon_formula: eps must be positive");
  CurvaturePack P = curvatures(M);
  MatrixXd ric = MatrixXd::Zero(M.dim(), M.dim());
  ric.topLeftCorner(M.n, M.n) = P.ricH + (0.5 / eps) * P.J2;
  ric.bottomRightCorner(M.m, M.m) = eps * P.ricV + (1.0 / eps) * P.M2;
  return ric;
}

inline double ricci_formula_residual(const FoliationModel& M, double eps) {
  return (ricci_epsilon(M, eps) - ricci_epsilon_formula(M, eps)).cwiseAbs().maxCoeff();
}

inline CurvatureConstants extract_constants(const FoliationModel& M) {
  CurvaturePack P = curvatures(M);
  CurvatureConstants k;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es;
  es.compute(P.ricH);
  k.rho1 = es.eigenvalues().minCoeff();
  es.compute(-P.J2);
  k.kappa = es.eigenvalues().maxCoeff();
  es.compute(P.M2);
  k.rho2 = es.eigenvalues().minCoeff();
  es.compute(P.ricV);
  k.rho3 = es.eigenvalues().minCoeff();
  return k;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace detail {

// Rank growth of iterated horizontal brackets; returns the step at which the
// full frame is spanned, or 0 if the span stalls short of full dimension.
inline int bracket_generating_step(const FoliationModel& M) {
  const int d = M.dim();
  std::vector<VectorXd> span;
  auto rank_of = [&](const std::vector<VectorXd>& vs) {
    if (vs.empty()) return 0L;
    MatrixXd A(d, vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i) A.col(i) = vs[i];
    return static_cast<long>(A.fullPivLu().rank());
  };
  for (int i = 0; i < M.n; ++i) span.push_back(VectorXd::Unit(d, i));
  long rank = rank_of(span);
  int step = 1;
  while (rank < d) {
    std::vector<VectorXd> next = span;
    for (const auto& v : span)
      for (int i = 0; i < M.n; ++i) {
        // [e_i, v] = sum_b v_b [e_i, e_b]
        VectorXd w = VectorXd::Zero(d);
        for (int b = 0; b < d; ++b)
          if (v[b] != 0.0)
            for (int a = 0; a < d; ++a) w[a] += v[b] * M.c[a](i, b);
        next.push_back(w);
      }
    long next_rank = rank_of(next);
    if (next_rank == rank) return 0;
    span = std::move(next);
    rank = next_rank;
    ++step;
  }
  return step;
}

}  // namespace detail

inline ValidationReport validate_structure(const FoliationModel& M, unsigned chart_seed = 7,
                                           int chart_samples = 16) {
  ValidationReport R;
  const int d = M.dim(), n = M.n;

  for (int a = 0; a < d; ++a)
    R.antisymmetry_residual =
        std::max(R.antisymmetry_residual, (M.c[a] + M.c[a].transpose()).cwiseAbs().maxCoeff());
  R.antisymmetry_ok = R.antisymmetry_residual < 1e-14;

  // Jacobi: sum_cyc [[e_a,e_b],e_c] = 0
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int cc = 0; cc < d; ++cc)
        for (int e = 0; e < d; ++e) {
          double r = 0.0;
          for (int f = 0; f < d; ++f)
            r += M.c[f](a, b) * M.c[e](f, cc) + M.c[f](b, cc) * M.c[e](f, a) +
                 M.c[f](cc, a) * M.c[e](f, b);
          R.jacobi_residual = std::max(R.jacobi_residual, std::abs(r));
        }
  R.jacobi_ok = R.jacobi_residual < 1e-12;

  // Vertical integrability: [V,V] has no horizontal part.
  for (int a = 0; a < n; ++a)
    for (int b = n; b < d; ++b)
      for (int cc = n; cc < d; ++cc)
        R.vertical_integrability_residual =
            std::max(R.vertical_integrability_residual, std::abs(M.c[a](b, cc)));
  R.vertical_integrability_ok = R.vertical_integrability_residual < 1e-14;

  R.bracket_generating_step = detail::bracket_generating_step(M);
  R.bracket_generating_ok = R.bracket_generating_step > 0;

  // Totally geodesic leaves: (D_Z W)_H = 0 for vertical Z, W.
  ConnectionCoeffs D = levi_civita(M, 1.0);
  for (int a = n; a < d; ++a)
    for (int b = n; b < d; ++b)
      for (int cc = 0; cc < n; ++cc)
        R.totally_geodesic_residual =
            std::max(R.totally_geodesic_residual, std::abs(D.gamma[a](b, cc)));
  R.totally_geodesic_ok = R.totally_geodesic_residual < 1e-12;

  // Bundle-like metric: vertical Lie derivative of g_H vanishes, i.e. the
  // matrix <[Z,X_i]_H, X_j> is antisymmetric in (i,j) for each vertical Z.
  for (int z = n; z < d; ++z) {
    MatrixXd B(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) B(i, j) = M.c[j](z, i);
    R.bundle_like_residual =
        std::max(R.bundle_like_residual, (B + B.transpose()).cwiseAbs().maxCoeff());
  }
  R.bundle_like_ok = R.bundle_like_residual < 1e-12;

  // Yang-Mills: delta_H T = sum_i (nabla_{X_i} T)(X_i, Y) = 0 for horizontal Y.
  {
    ConnectionCoeffs B = bott_connection(M);
    CurvaturePack P = torsion_and_j(M);
    auto torsion_vec = [&](int i, int j) {
      VectorXd t = VectorXd::Zero(M.m);
      if (i < n && j < n)
        for (int l = 0; l < M.m; ++l) t[l] = P.torsion[l](i, j);
      return t;
    };
    for (int y = 0; y < n; ++y) {
      VectorXd acc = VectorXd::Zero(M.m);
      for (int i = 0; i < n; ++i) {
        // nabla_{X_i}(T(X_i, X_y)) : vertical vector, rotated by the vertical
        // block of the Bott connection.
        VectorXd t = torsion_vec(i, y);
        for (int l = 0; l < M.m; ++l)
          for (int k = 0; k < M.m; ++k) acc[k] += t[l] * B.gamma[i](n + l, n + k);
        // - T(nabla_{X_i} X_i, X_y) - T(X_i, nabla_{X_i} X_y)
        for (int h = 0; h < n; ++h) {
          acc -= B.gamma[i](i, h) * torsion_vec(h, y);
          acc -= B.gamma[i](y, h) * torsion_vec(i, h);
        }
      }
      R.yang_mills_residual = std::max(R.yang_mills_residual, acc.cwiseAbs().maxCoeff());
    }
  }
  R.yang_mills_ok = R.yang_mills_residual < 1e-12;

  // Chart consistency: realized frame brackets reproduce c at random points.
  if (M.frame && M.sample_point) {
    std::mt19937 rng(chart_seed);
    const int cd = M.dim();
    for (int s = 0; s < chart_samples; ++s) {
      VectorXd p = M.sample_point(rng);
      std::vector<std::vector<Jet>> F(cd);
      for (int a = 0; a < cd; ++a) F[a] = M.frame(a, p, 1);
      for (int a = 0; a < cd; ++a)
        for (int b = a + 1; b < cd; ++b) {
          // [F_a, F_b]^k = sum_d (F_a^d d_d F_b^k - F_b^d d_d F_a^k)
          for (int k = 0; k < cd; ++k) {
            double br = 0.0;
            for (int dd = 0; dd < cd; ++dd) {
              br += F[a][dd].value() * F[b][k].deriv(dd).value();
              br -= F[b][dd].value() * F[a][k].deriv(dd).value();
            }
            double expected = 0.0;
            for (int e = 0; e < cd; ++e) expected += M.c[e](a, b) * F[e][k].value();
            // c is constant in the frame basis, so expected = sum c^e F_e^k.
            R.chart_residual = std::max(R.chart_residual, std::abs(br - expected));
          }
        }
    }
    R.chart_ok = R.chart_residual < 1e-10;
  }

  return R;
}

// ---------------------------------------------------------------------------
// Catalog and config loading
// ---------------------------------------------------------------------------

inline FoliationModel load_model(const std::string& name) {
  if (name == "heisenberg") return heisenberg_model();
  if (name == "su2") return su2_model();
  if (name == "abelian") return abelian_model();
  throw std::invalid_argument("unknown model '" + name + "'");
}

// Builds a model from raw config data: bracket triples (a,b,c,value) are
// 1-based with [e_b,e_c] = value * e_a; chart rows give the coefficient
// expressions of each frame field over the named coordinates.
inline FoliationModel make_model_from_config(
    const std::string& name, int n, int m,
    const std::vector<std::tuple<int, int, int, double>>& brackets,
    const std::vector<std::vector<std::string>>& chart,
    const std::vector<std::string>& coords) {
  if (n < 1 || m < 1) throw std::invalid_argument("model config: need n >= 1 and m >= 1");
  FoliationModel M;
  M.name = name;
  M.n = n;
  M.m = m;
  const int d = n + m;
  M.c = detail::zero_constants(d);
  std::vector<MatrixXd> assigned(d, MatrixXd::Zero(d, d));
  for (auto& [a1, b1, c1, v] : brackets) {
    int a = a1 - 1, b = b1 - 1, cc = c1 - 1;
    if (a < 0 || a >= d || b < 0 || b >= d || cc < 0 || cc >= d)
      throw std::invalid_argument("model config: bracket index out of range");
    if (assigned[a](b, cc) != 0.0 && M.c[a](b, cc) != v) {
      std::ostringstream os;
      os << "model config: antisymmetry conflict at triple (" << a1 << "," << b1 << "," << c1
         << ")";
      throw std::invalid_argument(os.str());
    }
    M.c[a](b, cc) = v;
    M.c[a](cc, b) = -v;
    assigned[a](b, cc) = assigned[a](cc, b) = 1.0;
  }
  // Reject configs violating the Jacobi identity, naming the failing triple.
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int cc = 0; cc < d; ++cc)
        for (int e = 0; e < d; ++e) {
          double r = 0.0;
          for (int f = 0; f < d; ++f)
            r += M.c[f](a, b) * M.c[e](f, cc) + M.c[f](b, cc) * M.c[e](f, a) +
                 M.c[f](cc, a) * M.c[e](f, b);
          if (std::abs(r) > 1e-12) {
            std::ostringstream os;
            os << "model config: Jacobi identity fails on triple (" << a + 1 << "," << b + 1 << ","
               << cc + 1 << "), residual " << r;
            throw std::invalid_argument(os.str());
          }
        }
  if (!chart.empty()) {
    if (static_cast<int>(chart.size()) != d || static_cast<int>(coords.size()) != d)
      throw std::invalid_argument("model config: chart must have one row per frame field");
    std::vector<std::vector<Expr>> rows(d);
    for (int a = 0; a < d; ++a) {
      if (static_cast<int>(chart[a].size()) != d)
        throw std::invalid_argument("model config: chart row has wrong width");
      for (const auto& text : chart[a]) rows[a].push_back(parse_expr(text, coords));
    }
    M.frame = [rows, d](int a, const VectorXd& p, int order) {
      std::vector<Jet> vars;
      for (int i = 0; i < d; ++i) vars.push_back(Jet::variable(d, order, i, p[i]));
      std::vector<Jet> coeff;
      for (int i = 0; i < d; ++i) coeff.push_back(rows.at(a)[i].eval(vars));
      return coeff;
    };
    M.sample_point = [d](std::mt19937& rng) {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      VectorXd p(d);
      for (int i = 0; i < d; ++i) p[i] = u(rng);
      return p;
    };
  }
  return M;
}

}  // namespace folia::models
