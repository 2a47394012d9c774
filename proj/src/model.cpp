#include "ymm/model.hpp"

#include <stdexcept>
#include <string>

namespace ymm {

void ModelSpec::validate() const {
  radial.validate();
  angular.validate();
  if (dim() < 8) throw std::invalid_argument("model: total dimension h0*h0*l0 must be >= 8");
  if (dim() > max_dimension)
    throw std::invalid_argument("model.max_dimension: dimension " + std::to_string(dim()) + " exceeds budget " +
                                std::to_string(max_dimension));
}

ModelSpec make_model_spec(int h0, int l0, double scale) {
  ModelSpec s;
  s.radial.h0 = h0;
  s.radial.scale = scale;
  s.angular.l0 = l0;
  return s;
}

TensorOperator assemble_4h(const ModelSpec& spec) {
  spec.validate();
  const RadialOperators r = compute_radial_operators(spec.radial);
  const auto eye = RadialFactor::eye();
  TensorOperator op(spec.radial.h0, spec.angular.l0, OperatorStructure::RealSymmetric);
  const auto p2 = RadialFactor::dense(r.p_squared.values);
  const auto xm2 = RadialFactor::dense(r.x_inv_squared.values);
  const auto x2 = RadialFactor::dense(r.x_squared.values);
  op.add_term({"kinetic", {{1.0, p2, eye}, {1.0, eye, p2}}, AngularFactor::eye()});
  op.add_term({"centrifugal", {{1.0, xm2, eye}, {1.0, eye, xm2}}, AngularFactor::diag(centrifugal_diagonal(spec.angular))});
  op.add_term({"quartic", {{1.0, x2, x2}}, AngularFactor::banded(a_matrix(spec.angular).to_sparse())});
  return op;
}

TensorOperator assemble_charge(const ModelSpec& spec) {
  spec.validate();
  const RadialOperators r = compute_radial_operators(spec.radial);
  const ChargeBands q = charge_bands(spec.angular, spec.charge_convention);
  const auto x = RadialFactor::dense(r.x.values);
  const auto xm1 = RadialFactor::dense(r.x_inv.values);
  const auto pt = RadialFactor::dense(r.p.values);
  TensorOperator op(spec.radial.h0, spec.angular.l0, OperatorStructure::ImaginaryHermitian);
  op.add_term({"momentum", {{1.0, x, pt}, {-1.0, pt, x}}, AngularFactor::banded(q.p.to_sparse())});
  op.add_term({"position", {{1.0, x, xm1}, {-1.0, xm1, x}}, AngularFactor::banded(q.x_imag.to_sparse())});
  return op;
}

TensorOperator assemble_charge_squared(const ModelSpec& spec) {
  const TensorOperator k = assemble_charge(spec);
  return operator_product(k, k, -1.0, OperatorStructure::RealSymmetric);
}

TensorOperator size_operator(const ModelSpec& spec) {
  spec.validate();
  const auto x2 = RadialFactor::dense(radial_operator_matrix(RadialOperatorKind::XSquared, spec.radial).values);
  const auto eye = RadialFactor::eye();
  TensorOperator op(spec.radial.h0, spec.angular.l0, OperatorStructure::RealSymmetric);
  op.add_term({"size", {{1.0, x2, eye}, {1.0, eye, x2}}, AngularFactor::eye()});
  return op;
}

}  // namespace ymm
