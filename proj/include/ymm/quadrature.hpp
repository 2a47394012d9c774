#pragma once

#include <Eigen/Dense>

#include <memory>

namespace ymm {

/// Gauss rule for the weight e^{-r^2} on (0, inf).
///
/// `weights` integrate f(r) e^{-r^2}; `scaled_weights` = weights * e^{r^2}
/// integrate g(r) directly when g = polynomial * e^{-r^2}. The scaled form stays
/// representable at the outer nodes where `weights` underflows.
struct HalfLineRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  Eigen::VectorXd scaled_weights;
  Eigen::VectorXd recurrence_alpha;  // monic three-term recurrence, diagonal
  Eigen::VectorXd recurrence_beta;   // off-diagonal (beta_1 .. beta_{n-1}), sqrt form

  Eigen::Index order() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [a, b].
void gauss_legendre(int n, double a, double b, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

/// Exact for (polynomial of degree <= 2*order-1) * e^{-r^2} on (0, inf).
///
/// Recurrence coefficients come from a discretized Stieltjes (Lanczos)
/// procedure on a composite Gauss-Legendre discretization of the weight;
/// nodes are the Jacobi-matrix eigenvalues and weights follow from the
/// Christoffel function, evaluated with the e^{-r^2/2} factor folded into the
/// orthonormal polynomials.
HalfLineRule halfline_quadrature(int order);

/// Memoized variant. The cache is mutex-guarded; rules are immutable.
std::shared_ptr<const HalfLineRule> cached_halfline_quadrature(int order);

}  // namespace ymm
