#include "ymm/angular.hpp"

#include "ymm/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace ymm {

void AngularSpec::validate() const {
  if (l0 < 3) throw std::invalid_argument("angular.l0: must be >= 3");
}

Eigen::VectorXd& BandedMatrix::band(int offset) {
  if (offset < 0 || offset >= dim_) throw std::out_of_range("BandedMatrix::band: offset out of range");
  auto it = bands_.find(offset);
  if (it == bands_.end()) it = bands_.emplace(offset, Eigen::VectorXd::Zero(dim_ - offset)).first;
  return it->second;
}

double BandedMatrix::operator()(Eigen::Index i, Eigen::Index j) const {
  const Eigen::Index off = j >= i ? j - i : i - j;
  auto it = bands_.find(static_cast<int>(off));
  if (it == bands_.end()) return 0.0;
  const double v = it->second[std::min(i, j)];
  if (j < i && symmetry_ == Symmetry::Antisymmetric) return -v;
  return v;
}

Eigen::MatrixXd BandedMatrix::to_dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim_, dim_);
  const double lower = symmetry_ == Symmetry::Symmetric ? 1.0 : -1.0;
  for (const auto& [off, v] : bands_) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      m(i, i + off) = v[i];
      if (off > 0) m(i + off, i) = lower * v[i];
    }
  }
  return m;
}

Eigen::SparseMatrix<double> BandedMatrix::to_sparse() const {
  std::vector<Eigen::Triplet<double>> t;
  const double lower = symmetry_ == Symmetry::Symmetric ? 1.0 : -1.0;
  for (const auto& [off, v] : bands_) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (v[i] == 0.0) continue;
      t.emplace_back(i, i + off, v[i]);
      if (off > 0) t.emplace_back(i + off, i, lower * v[i]);
    }
  }
  Eigen::SparseMatrix<double> s(dim_, dim_);
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

namespace {

double legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return p0;
  for (int k = 1; k < n; ++k) {
    const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

}  // namespace

double legendre_triple_integral(int l, int lp) {
  if (l < 0 || lp < 0) throw std::invalid_argument("legendre_triple_integral: negative degree");
  const int n = (l + lp + 2) / 2 + 1;
  Eigen::VectorXd x, w;
  gauss_legendre(n, -1.0, 1.0, x, w);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double p2 = 1.5 * x[i] * x[i] - 0.5;
    sum += w[i] * legendre(l, x[i]) * p2 * legendre(lp, x[i]);
  }
  return sum;
}

double legendre_triple_integral_3j(int l, int lp) {
  if (l < 0 || lp < 0) throw std::invalid_argument("legendre_triple_integral_3j: negative degree");
  if (l > lp) std::swap(l, lp);
  const double a = l;
  if (lp == l) {
    if (l == 0) return 0.0;
    return 2.0 * a * (a + 1.0) / ((2.0 * a - 1.0) * (2.0 * a + 1.0) * (2.0 * a + 3.0));
  }
  if (lp == l + 2)
    return 3.0 * (a + 1.0) * (a + 2.0) / ((2.0 * a + 1.0) * (2.0 * a + 3.0) * (2.0 * a + 5.0));
  return 0.0;
}

double c_coefficient(int l, int lp) {
  const double sign = ((l - lp) % 2 == 0) ? 1.0 : -1.0;
  const double norm = std::sqrt(5.0) / (8.0 * std::numbers::pi);
  const int lo = std::min(l, lp), hi = std::max(l, lp);
  return sign * norm * std::sqrt((2.0 * lo + 1.0) * (2.0 * hi + 1.0)) * legendre_triple_integral(lo, hi);
}

BandedMatrix a_matrix(const AngularSpec& spec) {
  spec.validate();
  BandedMatrix a(spec.l0, BandedMatrix::Symmetry::Symmetric);
  Eigen::VectorXd& d = a.band(0);
  Eigen::VectorXd& o = a.band(2);
  for (int l = 0; l < spec.l0; ++l) {
    const double x = l;
    d[l] = 0.5 - 1.0 / (8.0 * x * (x + 1.0) - 6.0);
    if (l + 2 < spec.l0)
      o[l] = -(x + 1.0) * (x + 2.0) / (std::sqrt(2.0 * x + 1.0) * (2.0 * x + 3.0) * std::sqrt(2.0 * x + 5.0));
  }
  return a;
}

BandedMatrix a_matrix_oracle(const AngularSpec& spec) {
  spec.validate();
  // sin^2 = 2/3 (1 - P_2) combined with the product rule for c coefficients
  const double k = 8.0 * std::numbers::pi / (3.0 * std::sqrt(5.0));
  BandedMatrix a(spec.l0, BandedMatrix::Symmetry::Symmetric);
  Eigen::VectorXd& d = a.band(0);
  Eigen::VectorXd& o = a.band(2);
  for (int l = 0; l < spec.l0; ++l) {
    d[l] = 2.0 / 3.0 - k * c_coefficient(l, l);
    if (l + 2 < spec.l0) o[l] = -k * c_coefficient(l, l + 2);
  }
  return a;
}

Eigen::VectorXd centrifugal_diagonal(const AngularSpec& spec) {
  spec.validate();
  Eigen::VectorXd d(spec.l0);
  for (int l = 0; l < spec.l0; ++l) d[l] = static_cast<double>(l) * (l + 1);
  return d;
}

Eigen::MatrixXcd ChargeBands::q_x_complex() const {
  return std::complex<double>(0.0, 1.0) * x_imag.to_dense().cast<std::complex<double>>();
}

ChargeBands charge_bands(const AngularSpec& spec, ChargeConvention convention) {
  spec.validate();
  ChargeBands q{BandedMatrix(spec.l0, BandedMatrix::Symmetry::Symmetric),
                BandedMatrix(spec.l0, BandedMatrix::Symmetry::Antisymmetric)};
  Eigen::VectorXd& p = q.p.band(1);
  Eigen::VectorXd& x = q.x_imag.band(1);
  for (int l = 0; l + 1 < spec.l0; ++l) {
    if (convention == ChargeConvention::Consistent) {
      const double m = l + 1.0;
      const double s = 1.0 / std::sqrt(4.0 * m * m - 1.0);
      p[l] = -m * s;
      x[l] = m * m * s;
    } else {
      const double m = l;
      if (l == 0) continue;
      const double s = 1.0 / std::sqrt(4.0 * m * m - 1.0);
      p[l] = -m * s;
      x[l] = -m * m * s;
    }
  }
  return q;
}

}  // namespace ymm
