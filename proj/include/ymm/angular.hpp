#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <map>

namespace ymm {

/// Retained angular levels l = 0 .. l0-1.
struct AngularSpec {
  int l0 = 24;
  void validate() const;
};

/// Square band matrix stored by offset (offset >= 0 holds the super-diagonal;
/// the sub-diagonal follows from the symmetry flag).
class BandedMatrix {
 public:
  enum class Symmetry { Symmetric, Antisymmetric };

  BandedMatrix() = default;
  BandedMatrix(Eigen::Index dim, Symmetry symmetry) : dim_(dim), symmetry_(symmetry) {}

  Eigen::Index rows() const { return dim_; }
  Eigen::Index cols() const { return dim_; }
  Symmetry symmetry() const { return symmetry_; }

  /// Entry (i, i+offset) for i = 0 .. dim-offset-1.
  Eigen::VectorXd& band(int offset);
  const std::map<int, Eigen::VectorXd>& bands() const { return bands_; }

  double operator()(Eigen::Index i, Eigen::Index j) const;

  Eigen::MatrixXd to_dense() const;
  Eigen::SparseMatrix<double> to_sparse() const;

 private:
  Eigen::Index dim_ = 0;
  Symmetry symmetry_ = Symmetry::Symmetric;
  std::map<int, Eigen::VectorXd> bands_;
};

/// int_{-1}^{1} P_l P_2 P_lp dx by exact Gauss-Legendre quadrature.
double legendre_triple_integral(int l, int lp);
/// Same value through the closed-form squared 3j symbols (l 2 lp; 0 0 0).
double legendre_triple_integral_3j(int l, int lp);

/// c_{l,2,lp}; symmetric in (l, lp).
double c_coefficient(int l, int lp);

/// Closed-form A (band offsets 0 and 2).
BandedMatrix a_matrix(const AngularSpec& spec);
/// A reconstructed from c coefficients together with the sin^2 identity.
BandedMatrix a_matrix_oracle(const AngularSpec& spec);

/// Diagonal l(l+1).
Eigen::VectorXd centrifugal_diagonal(const AngularSpec& spec);

enum class ChargeConvention {
  /// (Q_p)_{l,l+1} = -m/sqrt(4m^2-1), (Q_x)_{l,l+1} = +i m^2/sqrt(4m^2-1), m = l+1,
  /// consistent with radial P = -i d/dr. Commutes with 4H before truncation.
  Consistent,
  /// Index m = l and the opposite Q_x sign; entries at l = 0 set to 0.
  Unshifted,
};

/// Q_p is real symmetric; Q_x = i * x_imag with x_imag real antisymmetric.
struct ChargeBands {
  BandedMatrix p;
  BandedMatrix x_imag;

  Eigen::MatrixXcd q_x_complex() const;
};

ChargeBands charge_bands(const AngularSpec& spec, ChargeConvention convention = ChargeConvention::Consistent);

}  // namespace ymm
