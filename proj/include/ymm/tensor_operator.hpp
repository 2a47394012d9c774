#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <complex>
#include <string>
#include <vector>

#include "json.hpp"

namespace ymm {

/// Factor on one radial register: identity or an h0 x h0 matrix. Tridiagonal
/// matrices are detected on construction and applied as band updates.
struct RadialFactor {
  bool identity = true;
  Eigen::MatrixXd matrix;
  bool tridiagonal = false;
  Eigen::VectorXd diag, upper, lower;  // F(i,i), F(i,i+1), F(i+1,i)

  static RadialFactor eye() { return {}; }
  static RadialFactor dense(Eigen::MatrixXd m);
};

/// Factor on the angular register.
struct AngularFactor {
  enum class Kind { Identity, Diagonal, Sparse };
  Kind kind = Kind::Identity;
  Eigen::VectorXd diagonal;
  Eigen::SparseMatrix<double, Eigen::RowMajor> sparse;

  static AngularFactor eye() { return {}; }
  static AngularFactor diag(Eigen::VectorXd d);
  static AngularFactor banded(const Eigen::SparseMatrix<double>& m);

  Eigen::MatrixXd to_dense(Eigen::Index l0) const;
};

struct RadialPair {
  double coef = 1.0;
  RadialFactor first, second;
};

/// sum_p coef_p (first_p x second_p) x angular.
struct Term {
  std::string label;
  std::vector<RadialPair> pairs;
  AngularFactor angular;
};

enum class OperatorStructure {
  RealSymmetric,       // represented operator = kernel
  ImaginaryHermitian,  // represented operator = i * kernel, kernel real antisymmetric
};

/// Sum of Kronecker terms on (h0, h0, l0). Basis index i + h0*j + h0*h0*l for
/// register-1 level i, register-2 level j, angular level l. Everything below
/// operates on the real kernel; see `structure` for the represented operator.
class TensorOperator {
 public:
  TensorOperator() = default;
  TensorOperator(int h0, int l0, OperatorStructure structure) : h0_(h0), l0_(l0), structure_(structure) {}

  int h0() const { return h0_; }
  int l0() const { return l0_; }
  Eigen::Index dim() const { return Eigen::Index(h0_) * h0_ * l0_; }
  OperatorStructure structure() const { return structure_; }
  const std::vector<Term>& terms() const { return terms_; }

  /// Throws std::invalid_argument if the factors are not conformable.
  void add_term(Term term);

 private:
  int h0_ = 0;
  int l0_ = 0;
  OperatorStructure structure_ = OperatorStructure::RealSymmetric;
  std::vector<Term> terms_;
};

/// Kernel application out = K v. `threads` > 1 splits angular slices across
/// workers; each output entry is computed by the same arithmetic sequence, so
/// the result is bit-identical to the serial path.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> apply(const TensorOperator& op,
                                               const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v,
                                               int threads = 1);

void apply_into(const TensorOperator& op, const Eigen::VectorXd& v, Eigen::VectorXd& out, int threads = 1);
/// Complex vectors: kernel applied to real and imaginary parts separately.
void apply_into(const TensorOperator& op, const Eigen::VectorXcd& v, Eigen::VectorXcd& out, int threads = 1);

/// Represented (Hermitian) operator on a complex vector: K v, or i K v.
Eigen::VectorXcd apply_hermitian(const TensorOperator& op, const Eigen::VectorXcd& v, int threads = 1);

/// Entrywise loop-based materialization of the kernel (independent of apply).
Eigen::MatrixXd materialize_dense(const TensorOperator& op, Eigen::Index max_dim = 4096);
/// Represented operator as a complex matrix.
Eigen::MatrixXcd materialize_dense_hermitian(const TensorOperator& op, Eigen::Index max_dim = 4096);

/// Product of kernels a*b scaled by `factor`, expanded term by term.
TensorOperator operator_product(const TensorOperator& a, const TensorOperator& b, double factor,
                                OperatorStructure structure);

/// Angular levels l < l0 with l % 2 == parity.
std::vector<int> parity_levels(int l0, int parity);

/// Operator compressed onto the listed angular levels (in order).
TensorOperator restrict_levels(const TensorOperator& op, const std::vector<int>& levels);
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> extract_levels(const Eigen::MatrixBase<Derived>& v, int h0,
                                                                           const std::vector<int>& levels) {
  const Eigen::Index block = Eigen::Index(h0) * h0;
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> out(block * Eigen::Index(levels.size()));
  for (std::size_t k = 0; k < levels.size(); ++k)
    out.segment(Eigen::Index(k) * block, block) = v.segment(Eigen::Index(levels[k]) * block, block);
  return out;
}
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> embed_levels(const Eigen::MatrixBase<Derived>& v, int h0,
                                                                         int l0, const std::vector<int>& levels) {
  const Eigen::Index block = Eigen::Index(h0) * h0;
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> out =
      Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>::Zero(block * l0);
  for (std::size_t k = 0; k < levels.size(); ++k)
    out.segment(Eigen::Index(levels[k]) * block, block) = v.segment(Eigen::Index(k) * block, block);
  return out;
}

/// Register swap 1 <-> 2 applied to a state vector.
Eigen::VectorXd swap_radial_registers(const Eigen::VectorXd& v, int h0, int l0);

nlohmann::json to_json(const TensorOperator& op);

}  // namespace ymm
