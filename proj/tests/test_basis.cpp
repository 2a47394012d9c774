#include "doctest.h"

#include "ymm/angular.hpp"
#include "ymm/quadrature.hpp"
#include "ymm/radial_basis.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

using namespace ymm;

namespace {

const double kPi = std::numbers::pi;

// Brute-force reference: composite Gauss-Legendre on [0, 40] applied to the
// odd oscillator functions from their own three-term recurrence.
struct BruteRadial {
  Eigen::VectorXd r, w;
  Eigen::MatrixXd chi, dchi;

  explicit BruteRadial(int h0) {
    const int panels = 800, pts = 16;
    Eigen::VectorXd gx, gw;
    gauss_legendre(pts, 0.0, 0.05, gx, gw);
    r.resize(panels * pts);
    w.resize(panels * pts);
    for (int p = 0; p < panels; ++p)
      for (int i = 0; i < pts; ++i) {
        r[p * pts + i] = p * 0.05 + gx[i];
        w[p * pts + i] = gw[i];
      }
    chi.resize(h0, r.size());
    dchi.resize(h0, r.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      std::vector<double> psi(2 * h0 + 2);
      psi[0] = std::pow(kPi, -0.25) * std::exp(-r[i] * r[i] / 2);
      psi[1] = std::sqrt(2.0) * r[i] * psi[0];
      for (int n = 1; n < 2 * h0 + 1; ++n)
        psi[n + 1] = std::sqrt(2.0 / (n + 1)) * r[i] * psi[n] - std::sqrt(double(n) / (n + 1)) * psi[n - 1];
      for (int k = 0; k < h0; ++k) {
        const int n = 2 * k + 1;
        chi(k, i) = std::sqrt(2.0) * psi[n];
        dchi(k, i) = std::sqrt(2.0) * (std::sqrt(n / 2.0) * psi[n - 1] - std::sqrt((n + 1) / 2.0) * psi[n + 1]);
      }
    }
  }

  Eigen::MatrixXd inner(const Eigen::MatrixXd& f, const Eigen::MatrixXd& g, const Eigen::ArrayXd& mult) const {
    Eigen::MatrixXd gw = g.array().rowwise() * (w.array() * mult).transpose();
    return f * gw.transpose();
  }
};

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("halfline quadrature gaussian moments") {
  for (int order : {2, 8, 24, 72}) {
    const HalfLineRule rule = halfline_quadrature(order);
    CHECK(rule.order() == order);
    CHECK(rule.weights.sum() == doctest::Approx(std::sqrt(kPi) / 2).epsilon(1e-14));
    CHECK(rule.weights.dot(rule.nodes.cwiseAbs2()) == doctest::Approx(std::sqrt(kPi) / 4).epsilon(1e-14));
    if (order >= 3) {
      const double m4 = rule.weights.dot(rule.nodes.array().pow(4).matrix());
      CHECK(m4 == doctest::Approx(3 * std::sqrt(kPi) / 8).epsilon(1e-13));
    }
  }
}

TEST_CASE("halfline quadrature exact up to degree 2*order-1") {
  const int order = 20;
  const HalfLineRule rule = halfline_quadrature(order);
  for (int m = 0; m <= 2 * order - 1; ++m) {
    const double exact = std::tgamma((m + 1) / 2.0) / 2.0;
    const double got = rule.weights.dot(rule.nodes.array().pow(m).matrix());
    CHECK(got == doctest::Approx(exact).epsilon(1e-12));
  }
  CHECK((rule.nodes.array() > 0).all());
  CHECK((rule.weights.array() > 0).all());
}

TEST_CASE("halfline quadrature rejects order < 2") {
  CHECK_THROWS_AS(halfline_quadrature(1), std::invalid_argument);
}

TEST_CASE("cached quadrature returns the same rule") {
  auto a = cached_halfline_quadrature(30);
  auto b = cached_halfline_quadrature(30);
  CHECK(a.get() == b.get());
}

TEST_CASE("odd oscillator values") {
  RadialBasisSpec spec{.h0 = 10};
  for (int k = 0; k < spec.h0; ++k) CHECK(odd_oscillator_value(k, 0.0, spec) == 0.0);
  CHECK(odd_oscillator_value(0, 1.0, spec) ==
        doctest::Approx(2.0 * std::pow(kPi, -0.25) * std::exp(-0.5)).epsilon(1e-14));
  CHECK(odd_oscillator_value(0, 1.0, spec) == doctest::Approx(0.911161).epsilon(1e-6));
  CHECK_THROWS_AS(odd_oscillator_value(10, 1.0, spec), std::out_of_range);
  CHECK_THROWS_AS(odd_oscillator_value(-1, 1.0, spec), std::out_of_range);

  const HalfLineRule rule = halfline_quadrature(16);
  double norm = 0.0;
  for (Eigen::Index i = 0; i < rule.order(); ++i) {
    const double v = odd_oscillator_value(0, rule.nodes[i], spec);
    norm += rule.scaled_weights[i] * v * v;
  }
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("odd oscillator values at non-unit scale stay normalized") {
  RadialBasisSpec spec{.h0 = 4, .scale = 1.7};
  for (int k = 0; k < 4; ++k) {
    double norm = 0.0;
    for (int p = 0; p < 40000; ++p) {
      const double r = (p + 0.5) * 1e-3;
      const double v = odd_oscillator_value(k, r, spec);
      norm += v * v * 1e-3;
    }
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("gram matrix is identity for h0 up to 128") {
  for (int h0 : {1, 7, 32, 64, 128}) {
    RadialBasisSpec spec{.h0 = h0};
    const auto rule = halfline_quadrature(spec.effective_quad_order());
    const Eigen::MatrixXd g = radial_gram(h0, rule);
    CHECK(max_abs(g - Eigen::MatrixXd::Identity(h0, h0)) < 1e-10);
  }
}

TEST_CASE("radial matrix element values") {
  RadialBasisSpec spec{.h0 = 12};
  const RadialOperators ops = compute_radial_operators(spec);
  CHECK(ops.x_squared.values(0, 0) == 1.5);
  CHECK(ops.p_squared.values(0, 0) == 1.5);
  CHECK(std::abs(ops.x_squared.values(0, 1) - std::sqrt(6.0) / 2) < 1e-15);
  CHECK(std::abs(ops.x_inv_squared.values(0, 0) - 2.0) < 1e-10);
  CHECK(std::abs(ops.x.values(0, 0) - 2.0 / std::sqrt(kPi)) < 1e-12);
  CHECK(ops.p.imaginary);
  for (int k = 0; k < spec.h0; ++k) CHECK(ops.p.values(k, k) == 0.0);
}

TEST_CASE("radial quadrature matrices match a brute-force integration") {
  const int h0 = 8;
  RadialBasisSpec spec{.h0 = h0};
  const RadialOperators ops = compute_radial_operators(spec);
  BruteRadial b(h0);
  const Eigen::ArrayXd one = Eigen::ArrayXd::Ones(b.r.size());
  CHECK(max_abs(ops.x_inv_squared.values - b.inner(b.chi, b.chi, 1.0 / b.r.array().square())) < 1e-9);
  CHECK(max_abs(ops.x.values - b.inner(b.chi, b.chi, b.r.array())) < 1e-11);
  CHECK(max_abs(ops.x_inv.values - b.inner(b.chi, b.chi, 1.0 / b.r.array())) < 1e-10);
  // P = -i D with D_jk = <chi_j|chi_k'>, stored as i*(-D)
  CHECK(max_abs(ops.p.values + b.inner(b.chi, b.dchi, one)) < 1e-11);
  CHECK(max_abs(ops.x_squared.values - b.inner(b.chi, b.chi, b.r.array().square())) < 1e-11);
  CHECK(max_abs(ops.p_squared.values - b.inner(b.dchi, b.dchi, one)) < 1e-11);
}

TEST_CASE("ladder and quadrature paths agree at h0 = 64") {
  RadialBasisSpec spec{.h0 = 64};
  const Eigen::MatrixXd x2 = radial_operator_matrix(RadialOperatorKind::XSquared, spec).values;
  const Eigen::MatrixXd p2 = radial_operator_matrix(RadialOperatorKind::PSquared, spec).values;
  CHECK(max_abs(x2 - radial_x_squared_by_quadrature(spec)) < 1e-10);
  CHECK(max_abs(p2 - radial_p_squared_by_quadrature(spec)) < 1e-10);
}

TEST_CASE("radial matrices: hermiticity, bands, definiteness") {
  for (int h0 : {1, 5, 24, 48}) {
    RadialBasisSpec spec{.h0 = h0};
    const RadialOperators ops = compute_radial_operators(spec);
    for (RadialOperatorKind kind : kAllRadialKinds) {
      const Eigen::MatrixXcd m = ops.get(kind).to_complex();
      CHECK(max_abs((m - m.adjoint()).cwiseAbs()) < 1e-12);
    }
    for (int i = 0; i < h0; ++i)
      for (int j = 0; j < h0; ++j)
        if (std::abs(i - j) > 1) {
          CHECK(ops.x_squared.values(i, j) == 0.0);
          CHECK(ops.p_squared.values(i, j) == 0.0);
        }
    for (const RadialMatrix* m : {&ops.x_squared, &ops.p_squared, &ops.x_inv_squared}) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m->values, Eigen::EigenvaluesOnly);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
  }
}

TEST_CASE("radial scale factors") {
  RadialBasisSpec unit{.h0 = 6};
  RadialBasisSpec scaled{.h0 = 6, .scale = 1.5};
  const RadialOperators a = compute_radial_operators(unit);
  const RadialOperators b = compute_radial_operators(scaled);
  const double s = 1.5;
  CHECK(max_abs(b.x_squared.values - s * s * a.x_squared.values) < 1e-13);
  CHECK(max_abs(b.p_squared.values - a.p_squared.values / (s * s)) < 1e-13);
  CHECK(max_abs(b.x_inv_squared.values - a.x_inv_squared.values / (s * s)) < 1e-13);
  CHECK(max_abs(b.x.values - s * a.x.values) < 1e-13);
  CHECK(max_abs(b.x_inv.values - a.x_inv.values / s) < 1e-13);
  CHECK(max_abs(b.p.values - a.p.values / s) < 1e-13);
}

TEST_CASE("insufficient quadrature is detected") {
  RadialBasisSpec spec{.h0 = 20};
  const HalfLineRule small = halfline_quadrature(12);
  CHECK_THROWS_AS(radial_operator_matrix(RadialOperatorKind::XInvSquared, spec, small), std::runtime_error);
  CHECK_THROWS_AS(radial_operator_matrix(RadialOperatorKind::P, spec, small), std::runtime_error);
}

TEST_CASE("radial spec validation names the field") {
  auto message = [](const RadialBasisSpec& s) {
    try {
      s.validate();
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message({.h0 = 0}).find("radial.h0") != std::string::npos);
  CHECK(message({.h0 = 10, .quad_order = 27}).find("radial.quad_order") != std::string::npos);
  CHECK(message({.h0 = 10, .quad_order = 28}).empty());
  CHECK(message({.h0 = 10, .scale = 0.0}).find("radial.scale") != std::string::npos);
}

TEST_CASE("legendre triple integral values") {
  CHECK(std::abs(legendre_triple_integral(0, 0)) < 1e-15);
  CHECK(legendre_triple_integral(0, 2) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(legendre_triple_integral(1, 1) == doctest::Approx(4.0 / 15.0).epsilon(1e-14));
  CHECK(legendre_triple_integral_3j(0, 2) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(legendre_triple_integral_3j(1, 1) == doctest::Approx(4.0 / 15.0).epsilon(1e-15));
}

TEST_CASE("legendre triple integral selection rule and 3j agreement") {
  for (int l = 0; l <= 50; ++l)
    for (int lp = 0; lp <= 50; ++lp) {
      const double v = legendre_triple_integral(l, lp);
      const int d = std::abs(l - lp);
      if ((d != 0 && d != 2) || (l == 0 && lp == 0))
        CHECK(std::abs(v) < 1e-14);
      else
        CHECK(v > 0.0);
      CHECK(std::abs(v - legendre_triple_integral_3j(l, lp)) < 1e-14);
    }
}

TEST_CASE("c coefficient values and symmetry") {
  CHECK(std::abs(c_coefficient(0, 0)) < 1e-16);
  CHECK(c_coefficient(0, 2) == doctest::Approx(1.0 / (4 * kPi)).epsilon(1e-14));
  CHECK(c_coefficient(1, 1) == doctest::Approx(std::sqrt(5.0) / (10 * kPi)).epsilon(1e-14));
  for (int l = 0; l < 60; ++l)
    for (int lp = 0; lp < 60; ++lp) CHECK(c_coefficient(l, lp) == c_coefficient(lp, l));
}

TEST_CASE("A matrix entries") {
  const BandedMatrix a = a_matrix({.l0 = 10});
  CHECK(a(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(a(1, 1) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(a(0, 2) == doctest::Approx(-2.0 / (3.0 * std::sqrt(5.0))).epsilon(1e-15));
  CHECK(a(0, 2) == doctest::Approx(-0.298142).epsilon(1e-6));
  CHECK(a(2, 0) == a(0, 2));
  CHECK(a(0, 1) == 0.0);
  CHECK(a(0, 3) == 0.0);
  const BandedMatrix big = a_matrix({.l0 = 2000});
  CHECK(std::abs(big(1997, 1997) - 0.5) < 1e-6);
  CHECK(std::abs(big(1995, 1997) + 0.25) < 1e-3);
}

TEST_CASE("A matrix matches its first-principles reconstruction") {
  const AngularSpec spec{.l0 = 200};
  const Eigen::MatrixXd a = a_matrix(spec).to_dense();
  const Eigen::MatrixXd o = a_matrix_oracle(spec).to_dense();
  CHECK(max_abs(a - o) < 1e-12);
  CHECK(max_abs(a - a.transpose()) == 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("angular spec validation") {
  CHECK_THROWS_WITH_AS(AngularSpec{.l0 = 2}.validate(), doctest::Contains("angular.l0"), std::invalid_argument);
  CHECK_NOTHROW(AngularSpec{.l0 = 3}.validate());
}

TEST_CASE("charge bands, unshifted convention") {
  const ChargeBands q = charge_bands({.l0 = 6}, ChargeConvention::Unshifted);
  CHECK(q.p(0, 1) == 0.0);
  CHECK(q.p(1, 2) == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-15));
  const Eigen::MatrixXcd qx = q.q_x_complex();
  CHECK(std::abs(qx(1, 2) - std::complex<double>(0.0, -1.0 / std::sqrt(3.0))) < 1e-15);
  CHECK(std::abs(qx(2, 1) - std::conj(qx(1, 2))) < 1e-15);
}

TEST_CASE("charge bands, consistent convention") {
  const ChargeBands q = charge_bands({.l0 = 6});
  CHECK(q.p(0, 1) == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(q.p(1, 2) == doctest::Approx(-2.0 / std::sqrt(15.0)).epsilon(1e-15));
  CHECK(q.x_imag(0, 1) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(q.x_imag(1, 0) == -q.x_imag(0, 1));
  const Eigen::MatrixXcd qx = q.q_x_complex();
  CHECK(max_abs((qx - qx.adjoint()).cwiseAbs()) == 0.0);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if (std::abs(i - j) != 1) {
        CHECK(q.p(i, j) == 0.0);
        CHECK(q.x_imag(i, j) == 0.0);
      }
}

TEST_CASE("banded matrix dense and sparse forms agree") {
  BandedMatrix m(5, BandedMatrix::Symmetry::Antisymmetric);
  m.band(1) << 1, 2, 3, 4;
  m.band(3) << 5, 6;
  const Eigen::MatrixXd d = m.to_dense();
  CHECK(max_abs(d + d.transpose()) == 0.0);
  CHECK(max_abs(d - Eigen::MatrixXd(m.to_sparse())) == 0.0);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) CHECK(m(i, j) == d(i, j));
  CHECK_THROWS_AS(m.band(5), std::out_of_range);
}
