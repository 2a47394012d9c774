#include "ymm/radial_basis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace ymm {

void RadialBasisSpec::validate() const {
  if (h0 < 1) throw std::invalid_argument("radial.h0: must be >= 1");
  if (quad_order != 0 && quad_order < 2 * h0 + 8)
    throw std::invalid_argument("radial.quad_order: must be >= 2*h0+8 (got " +
                                std::to_string(quad_order) + ")");
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw std::invalid_argument("radial.scale: must be positive and finite");
}

std::string_view to_string(RadialOperatorKind kind) {
  switch (kind) {
    case RadialOperatorKind::XSquared: return "XSquared";
    case RadialOperatorKind::PSquared: return "PSquared";
    case RadialOperatorKind::XInvSquared: return "XInvSquared";
    case RadialOperatorKind::X: return "X";
    case RadialOperatorKind::XInv: return "XInv";
    case RadialOperatorKind::P: return "P";
  }
  return "?";
}

Eigen::MatrixXcd RadialMatrix::to_complex() const {
  if (imaginary) return std::complex<double>(0.0, 1.0) * values.cast<std::complex<double>>();
  return values.cast<std::complex<double>>();
}

namespace {

// Full-line Hermite functions psi_0 .. psi_nmax at r, long double to keep
// e^{-r^2/2} representable at the outer quadrature nodes.
void hermite_functions(int nmax, long double r, std::vector<long double>& psi) {
  psi.assign(nmax + 2, 0.0L);
  psi[0] = std::pow(std::numbers::pi_v<long double>, -0.25L) * std::exp(-r * r / 2.0L);
  if (nmax >= 1) psi[1] = std::sqrt(2.0L) * r * psi[0];
  for (int n = 1; n <= nmax; ++n)
    psi[n + 1] = std::sqrt(2.0L / (n + 1)) * r * psi[n] - std::sqrt(static_cast<long double>(n) / (n + 1)) * psi[n - 1];
}

// Rows k, columns i: sqrt(scaled_w_i) chi_k(r_i) and the same for chi_k'.
void weighted_tables(int h0, const HalfLineRule& rule, Eigen::MatrixXd& b, Eigen::MatrixXd& db) {
  const Eigen::Index m = rule.order();
  b.resize(h0, m);
  db.resize(h0, m);
  std::vector<long double> psi;
  for (Eigen::Index i = 0; i < m; ++i) {
    const long double r = rule.nodes[i];
    hermite_functions(2 * h0, r, psi);
    const long double sw = std::sqrt(static_cast<long double>(rule.scaled_weights[i]) * 2.0L);
    for (int k = 0; k < h0; ++k) {
      const int n = 2 * k + 1;
      const long double d = std::sqrt(n / 2.0L) * psi[n - 1] - std::sqrt((n + 1) / 2.0L) * psi[n + 1];
      b(k, i) = static_cast<double>(sw * psi[n]);
      db(k, i) = static_cast<double>(sw * d);
    }
  }
}

void check_orthonormality(const Eigen::MatrixXd& b) {
  const Eigen::MatrixXd gram = b * b.transpose();
  const double resid = (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  if (resid > 1e-10)
    throw std::runtime_error("radial basis: orthonormality residual " + std::to_string(resid) +
                             " exceeds 1e-10; quadrature order too small");
}

Eigen::MatrixXd ladder_matrix(int h0, double sign) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(h0, h0);
  for (int k = 0; k < h0; ++k) {
    m(k, k) = 2.0 * k + 1.5;
    if (k + 1 < h0) {
      m(k, k + 1) = sign * 0.5 * std::sqrt((2.0 * k + 2.0) * (2.0 * k + 3.0));
      m(k + 1, k) = m(k, k + 1);
    }
  }
  return m;
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }
Eigen::MatrixXd antisymmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m - m.transpose()); }

}  // namespace

void odd_oscillator_table(int h0, const Eigen::VectorXd& r, Eigen::MatrixXd& values,
                          Eigen::MatrixXd* derivatives) {
  values.resize(h0, r.size());
  if (derivatives) derivatives->resize(h0, r.size());
  std::vector<long double> psi;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    hermite_functions(2 * h0, r[i], psi);
    for (int k = 0; k < h0; ++k) {
      const int n = 2 * k + 1;
      values(k, i) = static_cast<double>(std::sqrt(2.0L) * psi[n]);
      if (derivatives)
        (*derivatives)(k, i) = static_cast<double>(
            std::sqrt(2.0L) * (std::sqrt(n / 2.0L) * psi[n - 1] - std::sqrt((n + 1) / 2.0L) * psi[n + 1]));
    }
  }
}

double odd_oscillator_value(int k, double r, const RadialBasisSpec& spec) {
  if (k < 0 || k >= spec.h0) throw std::out_of_range("odd_oscillator_value: k out of range");
  if (r < 0.0) throw std::domain_error("odd_oscillator_value: r must be >= 0");
  std::vector<long double> psi;
  hermite_functions(2 * k + 1, r / spec.scale, psi);
  return static_cast<double>(std::sqrt(2.0L / spec.scale) * psi[2 * k + 1]);
}

Eigen::MatrixXd radial_gram(int h0, const HalfLineRule& rule) {
  Eigen::MatrixXd b, db;
  weighted_tables(h0, rule, b, db);
  return b * b.transpose();
}

RadialMatrix radial_operator_matrix(RadialOperatorKind kind, const RadialBasisSpec& spec,
                                    const HalfLineRule& rule) {
  spec.validate();
  const double s = spec.scale;
  const int h0 = spec.h0;
  if (kind == RadialOperatorKind::XSquared) return {s * s * ladder_matrix(h0, 1.0), false};
  if (kind == RadialOperatorKind::PSquared) return {ladder_matrix(h0, -1.0) / (s * s), false};

  Eigen::MatrixXd b, db;
  weighted_tables(h0, rule, b, db);
  check_orthonormality(b);
  const Eigen::ArrayXd r = rule.nodes.array();
  switch (kind) {
    case RadialOperatorKind::XInvSquared: {
      const Eigen::MatrixXd br = b.array().rowwise() / (r * r).transpose();
      return {symmetrized(b * br.transpose()) / (s * s), false};
    }
    case RadialOperatorKind::X: {
      const Eigen::MatrixXd br = b.array().rowwise() * r.transpose();
      return {symmetrized(b * br.transpose()) * s, false};
    }
    case RadialOperatorKind::XInv: {
      const Eigen::MatrixXd br = b.array().rowwise() / r.transpose();
      return {symmetrized(b * br.transpose()) / s, false};
    }
    case RadialOperatorKind::P: {
      // <chi_j| -i d/dr |chi_k> = i * (-D_jk), D_jk = int chi_j chi_k'
      Eigen::MatrixXd d = antisymmetrized(b * db.transpose());
      return {-d / s, true};
    }
    default: break;
  }
  throw std::logic_error("radial_operator_matrix: unhandled kind");
}

RadialMatrix radial_operator_matrix(RadialOperatorKind kind, const RadialBasisSpec& spec) {
  spec.validate();
  return radial_operator_matrix(kind, spec, *cached_halfline_quadrature(spec.effective_quad_order()));
}

Eigen::MatrixXd radial_x_squared_by_quadrature(const RadialBasisSpec& spec) {
  spec.validate();
  const auto rule = cached_halfline_quadrature(spec.effective_quad_order());
  Eigen::MatrixXd b, db;
  weighted_tables(spec.h0, *rule, b, db);
  check_orthonormality(b);
  const Eigen::ArrayXd r = rule->nodes.array();
  const Eigen::MatrixXd br = b.array().rowwise() * (r * r).transpose();
  return b * br.transpose() * spec.scale * spec.scale;
}

Eigen::MatrixXd radial_p_squared_by_quadrature(const RadialBasisSpec& spec) {
  spec.validate();
  const auto rule = cached_halfline_quadrature(spec.effective_quad_order());
  Eigen::MatrixXd b, db;
  weighted_tables(spec.h0, *rule, b, db);
  check_orthonormality(b);
  return db * db.transpose() / (spec.scale * spec.scale);
}

const RadialMatrix& RadialOperators::get(RadialOperatorKind kind) const {
  switch (kind) {
    case RadialOperatorKind::XSquared: return x_squared;
    case RadialOperatorKind::PSquared: return p_squared;
    case RadialOperatorKind::XInvSquared: return x_inv_squared;
    case RadialOperatorKind::X: return x;
    case RadialOperatorKind::XInv: return x_inv;
    case RadialOperatorKind::P: return p;
  }
  throw std::logic_error("RadialOperators::get: unhandled kind");
}

RadialOperators compute_radial_operators(const RadialBasisSpec& spec) {
  spec.validate();
  const auto rule = cached_halfline_quadrature(spec.effective_quad_order());
  RadialOperators ops;
  ops.spec = spec;
  ops.x_squared = radial_operator_matrix(RadialOperatorKind::XSquared, spec, *rule);
  ops.p_squared = radial_operator_matrix(RadialOperatorKind::PSquared, spec, *rule);
  ops.x_inv_squared = radial_operator_matrix(RadialOperatorKind::XInvSquared, spec, *rule);
  ops.x = radial_operator_matrix(RadialOperatorKind::X, spec, *rule);
  ops.x_inv = radial_operator_matrix(RadialOperatorKind::XInv, spec, *rule);
  ops.p = radial_operator_matrix(RadialOperatorKind::P, spec, *rule);
  return ops;
}

}  // namespace ymm
