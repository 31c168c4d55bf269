#pragma once

// Pointwise evaluation of the differential operators attached to a model
// foliation: horizontal/vertical/interpolated Laplacians, carre du champ,
// covariant Hessian blocks with respect to the Bott connection, the iterated
// forms Gamma2^H, T2, Gamma_{2,eps}, Gamma^V_{2,eps}, and the residuals/gaps
// of the Bochner identities and curvature-dimension inequalities.
//
// Everything is computed from exact jets of the test function; no finite
// differences enter the evaluation path.

#include <Eigen/Dense>
#include <stdexcept>
#include <utility>
#include <vector>

#include "folia/expr.hpp"
#include "folia/jet.hpp"
#include "folia/models.hpp"

namespace folia::calculus {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using models::ConnectionCoeffs;
using models::CurvatureConstants;
using models::FoliationModel;

struct OperatorValues {
  VectorXd gradH;   // X_i f
  VectorXd gradV;   // Z_l f
  double deltaH = 0.0;
  double deltaV = 0.0;
  double deltaEps = 0.0;
  double gammaEps = 0.0;  // |grad_H f|^2 + eps |grad_V f|^2
  MatrixXd hessHH;  // nabla^2 f(X_i, X_j)
  MatrixXd hessVH;  // nabla^2 f(Z_l, X_i)
  MatrixXd hessHV;  // nabla^2 f(X_i, Z_l)
  MatrixXd hessVV;  // nabla^2 f(Z_l, Z_k)
  double normHH2 = 0.0, normVH2 = 0.0, normHV2 = 0.0, normVV2 = 0.0;
};

// Jet of a test function at a chart point.
inline Jet jet(const Expr& f, const VectorXd& p, int order) {
  if (order > 4) throw std::invalid_argument("jet order must be <= 4");
  const int d = static_cast<int>(p.size());
  std::vector<Jet> vars;
  for (int i = 0; i < d; ++i) vars.push_back(Jet::variable(d, order, i, p[i]));
  return f.eval(vars);
}

// Frame/operator applications at a fixed chart point. Caches the Bott
// connection; frame coefficient jets are requested per application at the
// order the argument supports.
class PointOps {
public:
  PointOps(const FoliationModel& M, const VectorXd& p)
      : M_(M), p_(p), bott_(models::bott_connection(M)) {}

  const FoliationModel& model() const { return M_; }

  // X_a g as a jet one order lower.
  Jet apply(int a, const Jet& g) const {
    const int k = g.order() - 1;
    auto coeff = M_.frame(a, p_, k);
    Jet r(g.dim(), k, 0.0);
    for (int c = 0; c < static_cast<int>(coeff.size()); ++c) r += coeff[c] * g.deriv(c);
    return r;
  }

  // Covariant second application: nabla^2 g (e_a, e_b) = e_a(e_b g) - (nabla_{e_a} e_b) g
  Jet hessian(int a, int b, const Jet& g) const {
    Jet r = apply(a, apply(b, g));
    const int k = r.order();
    for (int c = 0; c < M_.dim(); ++c) {
      double gamma = bott_.gamma[a](b, c);
      if (gamma != 0.0) r -= gamma * apply(c, g).truncated(k);
    }
    return r;
  }

  // Covariant trace Laplacians.
  Jet delta_h(const Jet& g) const {
    Jet r(g.dim(), g.order() - 2, 0.0);
    for (int i = 0; i < M_.n; ++i) r += hessian(i, i, g);
    return r;
  }
  Jet delta_v(const Jet& g) const {
    Jet r(g.dim(), g.order() - 2, 0.0);
    for (int l = 0; l < M_.m; ++l) r += hessian(M_.n + l, M_.n + l, g);
    return r;
  }
  Jet delta_eps(const Jet& g, double eps) const {
    Jet r = delta_h(g);
    if (eps != 0.0) r += eps * delta_v(g);
    return r;
  }

  Jet gradH_sq(const Jet& g) const {
    Jet r(g.dim(), g.order() - 1, 0.0);
    for (int i = 0; i < M_.n; ++i) {
      Jet gi = apply(i, g);
      r += gi * gi;
    }
    return r;
  }
  Jet gradV_sq(const Jet& g) const {
    Jet r(g.dim(), g.order() - 1, 0.0);
    for (int l = 0; l < M_.m; ++l) {
      Jet gl = apply(M_.n + l, g);
      r += gl * gl;
    }
    return r;
  }

  double inner_gradH(const Jet& g1, const Jet& g2) const {
    double r = 0.0;
    for (int i = 0; i < M_.n; ++i) r += apply(i, g1).value() * apply(i, g2).value();
    return r;
  }
  double inner_gradV(const Jet& g1, const Jet& g2) const {
    double r = 0.0;
    for (int l = 0; l < M_.m; ++l)
      r += apply(M_.n + l, g1).value() * apply(M_.n + l, g2).value();
    return r;
  }

private:
  const FoliationModel& M_;
  VectorXd p_;
  ConnectionCoeffs bott_;
};

inline OperatorValues operators(const FoliationModel& M, const Expr& f, const VectorXd& p,
                                double eps) {
  if (eps < 0.0) throw std::invalid_argument("operators: eps must be >= 0");
  PointOps ops(M, p);
  Jet fj = jet(f, p, 3);
  OperatorValues v;
  const int n = M.n, m = M.m;
  v.gradH.resize(n);
  for (int i = 0; i < n; ++i) v.gradH[i] = ops.apply(i, fj).value();
  v.gradV.resize(m);
  for (int l = 0; l < m; ++l) v.gradV[l] = ops.apply(n + l, fj).value();
  v.hessHH.resize(n, n);
  v.hessVH.resize(m, n);
  v.hessHV.resize(n, m);
  v.hessVV.resize(m, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) v.hessHH(i, j) = ops.hessian(i, j, fj).value();
  for (int l = 0; l < m; ++l)
    for (int i = 0; i < n; ++i) {
      v.hessVH(l, i) = ops.hessian(n + l, i, fj).value();
      v.hessHV(i, l) = ops.hessian(i, n + l, fj).value();
    }
  for (int l = 0; l < m; ++l)
    for (int k = 0; k < m; ++k) v.hessVV(l, k) = ops.hessian(n + l, n + k, fj).value();
  v.deltaH = v.hessHH.trace();
  v.deltaV = v.hessVV.trace();
  v.deltaEps = v.deltaH + eps * v.deltaV;
  v.gammaEps = v.gradH.squaredNorm() + eps * v.gradV.squaredNorm();
  v.normHH2 = v.hessHH.squaredNorm();
  v.normVH2 = v.hessVH.squaredNorm();
  v.normHV2 = v.hessHV.squaredNorm();
  v.normVV2 = v.hessVV.squaredNorm();
  return v;
}

// Gamma2^H(f) = 1/2 Delta_H |grad_H f|^2 - <grad_H Delta_H f, grad_H f>
inline double gamma2_h(const FoliationModel& M, const Expr& f, const VectorXd& p) {
  PointOps ops(M, p);
  Jet fj = jet(f, p, 4);
  double lhs = 0.5 * ops.delta_h(ops.gradH_sq(fj)).value();
  return lhs - ops.inner_gradH(ops.delta_h(fj), fj.truncated(2));
}

// T2(f) = 1/2 Delta_eps |grad_H f|^2 - <grad_H Delta_eps f, grad_H f>
inline double t2(const FoliationModel& M, const Expr& f, const VectorXd& p, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("t2: eps must be positive");
  PointOps ops(M, p);
  Jet fj = jet(f, p, 4);
  return 0.5 * ops.delta_eps(ops.gradH_sq(fj), eps).value() -
         ops.inner_gradH(ops.delta_eps(fj, eps), fj.truncated(2));
}

// Gamma_{2,eps}(f) = 1/2 Delta_eps Gamma_eps(f) - Gamma_eps(f, Delta_eps f)
inline double gamma2_eps(const FoliationModel& M, const Expr& f, const VectorXd& p, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("gamma2_eps: eps must be positive");
  PointOps ops(M, p);
  Jet fj = jet(f, p, 4);
  Jet carre = ops.gradH_sq(fj) + eps * ops.gradV_sq(fj);
  Jet lap = ops.delta_eps(fj, eps);
  double polar = ops.inner_gradH(fj.truncated(3), lap) + eps * ops.inner_gradV(fj.truncated(3), lap);
  return 0.5 * ops.delta_eps(carre, eps).value() - polar;
}

// Gamma^V_{2,eps}(f) = 1/2 Delta_eps |grad_V f|^2 - <grad_V f, grad_V Delta_eps f>
inline double gamma2v_eps(const FoliationModel& M, const Expr& f, const VectorXd& p, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("gamma2v_eps: eps must be positive");
  PointOps ops(M, p);
  Jet fj = jet(f, p, 4);
  return 0.5 * ops.delta_eps(ops.gradV_sq(fj), eps).value() -
         ops.inner_gradV(fj.truncated(2), ops.delta_eps(fj, eps));
}

// Residuals of the two Bochner identities:
//   1/2 D_eps |gH f|^2 - <gH D_eps f, gH f> = Gamma2^H(f) + eps |hess_VH|^2
//   1/2 D_eps |gV f|^2 - <gV D_eps f, gV f> = eps |hess_VV|^2 + eps RicV(gV f, gV f) + |hess_HV|^2
inline std::pair<double, double> bochner_residuals(const FoliationModel& M, const Expr& f,
                                                   const VectorXd& p, double eps) {
  if (eps < 0.0) throw std::invalid_argument("bochner_residuals: eps must be >= 0");
  PointOps ops(M, p);
  Jet fj = jet(f, p, 4);
  OperatorValues v = operators(M, f, p, eps);
  Jet lap = ops.delta_eps(fj, eps);

  double lhsH = 0.5 * ops.delta_eps(ops.gradH_sq(fj), eps).value() -
                ops.inner_gradH(lap, fj.truncated(2));
  double rhsH = gamma2_h(M, f, p) + eps * v.normVH2;

  double lhsV = 0.5 * ops.delta_eps(ops.gradV_sq(fj), eps).value() -
                ops.inner_gradV(lap, fj.truncated(2));
  models::CurvaturePack P = models::curvatures(M);
  double ricv_term = v.gradV.transpose() * P.ricV * v.gradV;
  double rhsV = eps * v.normVV2 + eps * ricv_term + v.normHV2;

  return {std::abs(lhsH - rhsH), std::abs(lhsV - rhsV)};
}

inline double mixed_hessian_symmetry(const FoliationModel& M, const Expr& f, const VectorXd& p) {
  OperatorValues v = operators(M, f, p, 1.0);
  return std::abs(v.normHV2 - v.normVH2);
}

// Gap of (CD8): T2(f) - (rho1 - kappa/eps) |grad_H f|^2, nonnegative when the
// inequality holds.
inline double t2_gap(const FoliationModel& M, const Expr& f, const VectorXd& p, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("t2_gap: eps must be positive");
  CurvatureConstants k = models::extract_constants(M);
  OperatorValues v = operators(M, f, p, eps);
  return t2(M, f, p, eps) - (k.rho1 - k.kappa / eps) * v.gradH.squaredNorm();
}

// Coefficients of the generalized curvature-dimension inequality
//   G2e + nu G2Ve >= dim_coeff (D_eps f)^2 + c_gamma Gamma_eps(f) + c_vert |grad_V f|^2
struct CdCoefficients {
  double dim_coeff = 0.0;
  double c_gamma = 0.0;
  double c_vert = 0.0;
};

inline CdCoefficients cd_coefficients(const FoliationModel& M, const CurvatureConstants& k,
                                      double eps, double nu) {
  CdCoefficients c;
  c.dim_coeff = 1.0 / (M.n + M.m * eps / (nu + eps));
  c.c_gamma = k.rho1 - k.kappa / (2.0 * eps + nu);
  c.c_vert = k.rho2 - k.rho1 * eps + k.kappa * eps / (2.0 * eps + nu) + k.rho3 * eps * (nu + eps);
  return c;
}

inline double cd_gap(const FoliationModel& M, const Expr& f, const VectorXd& p, double eps,
                     double nu, const CurvatureConstants* constants = nullptr) {
  if (eps <= 0.0) throw std::invalid_argument("cd_gap: eps must be positive");
  if (nu < -eps || nu + eps <= 0.0) throw std::invalid_argument("cd_gap: need nu >= -eps, nu+eps > 0");
  CurvatureConstants k = constants ? *constants : models::extract_constants(M);
  CdCoefficients c = cd_coefficients(M, k, eps, nu);
  OperatorValues v = operators(M, f, p, eps);
  double lhs = gamma2_eps(M, f, p, eps) + nu * gamma2v_eps(M, f, p, eps);
  double rhs = c.dim_coeff * v.deltaEps * v.deltaEps + c.c_gamma * v.gammaEps +
               c.c_vert * v.gradV.squaredNorm();
  return lhs - rhs;
}

// Classical Bakry-Emery form: the nu = 0 specialization assembled on its own
// code path, for the consistency check.
inline double cd_gap_classical(const FoliationModel& M, const Expr& f, const VectorXd& p,
                               double eps) {
  if (eps <= 0.0) throw std::invalid_argument("cd_gap_classical: eps must be positive");
  CurvatureConstants k = models::extract_constants(M);
  OperatorValues v = operators(M, f, p, eps);
  double lhs = gamma2_eps(M, f, p, eps);
  double rhs = (1.0 / (M.n + M.m)) * v.deltaEps * v.deltaEps +
               (k.rho1 - k.kappa / (2.0 * eps)) * v.gammaEps +
               (k.rho2 - k.rho1 * eps + 0.5 * k.kappa + k.rho3 * eps * eps) *
                   v.gradV.squaredNorm();
  return lhs - rhs;
}

}  // namespace folia::calculus
