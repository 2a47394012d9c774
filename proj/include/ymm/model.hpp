#pragma once

#include "ymm/angular.hpp"
#include "ymm/radial_basis.hpp"
#include "ymm/tensor_operator.hpp"

namespace ymm {

/// Truncation (h0 radial levels per register, l0 angular levels).
struct ModelSpec {
  RadialBasisSpec radial;
  AngularSpec angular;
  ChargeConvention charge_convention = ChargeConvention::Consistent;
  Eigen::Index max_dimension = Eigen::Index(1) << 24;

  Eigen::Index dim() const { return Eigen::Index(radial.h0) * radial.h0 * angular.l0; }
  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

ModelSpec make_model_spec(int h0, int l0, double scale = 1.0);

/// 4H = (P^2 x 1 + 1 x P^2) x 1 + (X^-2 x 1 + 1 x X^-2) x diag(l(l+1)) + X^2 x X^2 x A.
TensorOperator assemble_4h(const ModelSpec& spec);

/// Q = i K with K = (X x Pt - Pt x X) x Q_p + (X x X^-1 - X^-1 x X) x Q_x/i, P = i Pt.
TensorOperator assemble_charge(const ModelSpec& spec);

/// Q^2 = -K^2 expanded into Kronecker terms; real symmetric.
TensorOperator assemble_charge_squared(const ModelSpec& spec);

/// X^2 x 1 x 1 + 1 x X^2 x 1.
TensorOperator size_operator(const ModelSpec& spec);

}  // namespace ymm
