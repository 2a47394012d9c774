#pragma once

#include "ymm/quadrature.hpp"

#include <Eigen/Dense>

#include <array>
#include <string_view>

namespace ymm {

/// Half-line basis of the first h0 odd oscillator eigenfunctions,
/// chi_k(r) = sqrt(2) psi_{2k+1}(r / scale) / sqrt(scale).
struct RadialBasisSpec {
  int h0 = 16;
  int quad_order = 0;  // 0 selects 2*h0 + 8
  double scale = 1.0;

  int effective_quad_order() const { return quad_order > 0 ? quad_order : 2 * h0 + 8; }
  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

enum class RadialOperatorKind { XSquared, PSquared, XInvSquared, X, XInv, P };

inline constexpr std::array<RadialOperatorKind, 6> kAllRadialKinds{
    RadialOperatorKind::XSquared, RadialOperatorKind::PSquared, RadialOperatorKind::XInvSquared,
    RadialOperatorKind::X,        RadialOperatorKind::XInv,     RadialOperatorKind::P};

std::string_view to_string(RadialOperatorKind kind);

/// Matrix of <chi_j|op|chi_k>. The represented matrix is `values` when
/// `imaginary` is false and i*values otherwise (only P, with values real
/// antisymmetric).
struct RadialMatrix {
  Eigen::MatrixXd values;
  bool imaginary = false;

  Eigen::MatrixXcd to_complex() const;
};

/// chi_k(r). Throws std::out_of_range for k outside [0, h0).
double odd_oscillator_value(int k, double r, const RadialBasisSpec& spec);

/// Values chi_k(r_i) (rows k, columns i) and derivatives, unit scale.
void odd_oscillator_table(int h0, const Eigen::VectorXd& r, Eigen::MatrixXd& values,
                          Eigen::MatrixXd* derivatives = nullptr);

/// Gram matrix of the basis under `rule` (unit scale).
Eigen::MatrixXd radial_gram(int h0, const HalfLineRule& rule);

/// XSquared / PSquared come from the ladder algebra (tridiagonal, exact); the
/// dense kinds from half-line quadrature. Throws std::runtime_error when the
/// rule's orthonormality residual exceeds 1e-10.
RadialMatrix radial_operator_matrix(RadialOperatorKind kind, const RadialBasisSpec& spec);
RadialMatrix radial_operator_matrix(RadialOperatorKind kind, const RadialBasisSpec& spec,
                                    const HalfLineRule& rule);

/// X^2 by quadrature instead of ladder algebra; cross-check path.
Eigen::MatrixXd radial_x_squared_by_quadrature(const RadialBasisSpec& spec);
/// P^2 = D^T D by quadrature of derivatives; cross-check path.
Eigen::MatrixXd radial_p_squared_by_quadrature(const RadialBasisSpec& spec);

/// All six kinds computed against one rule.
struct RadialOperators {
  RadialBasisSpec spec;
  RadialMatrix x_squared, p_squared, x_inv_squared, x, x_inv, p;

  const RadialMatrix& get(RadialOperatorKind kind) const;
};

RadialOperators compute_radial_operators(const RadialBasisSpec& spec);

}  // namespace ymm
