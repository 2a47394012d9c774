#include "ymm/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace ymm {

void gauss_legendre(int n, double a, double b, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  nodes.resize(n);
  weights.resize(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / dp;
      if (std::abs(z - z1) < 1e-15) {
        // one more pass so dp matches the converged root
        p1 = 1.0;
        p2 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
        }
        dp = n * (z * p1 - p2) / (z * z - 1.0);
        break;
      }
    }
    nodes[i] = mid - half * z;
    nodes[n - 1 - i] = mid + half * z;
    weights[i] = 2.0 * half / ((1.0 - z * z) * dp * dp);
    weights[n - 1 - i] = weights[i];
  }
}

namespace {

struct DiscreteMeasure {
  Eigen::VectorXd t;
  Eigen::VectorXd u;
};

DiscreteMeasure discretize_halfline_gaussian(int order) {
  const double reach = 2.0 * std::sqrt(static_cast<double>(order)) + 12.0;
  const double panel = 0.25;
  const int panels = static_cast<int>(std::ceil(reach / panel));
  const int per_panel = 20;
  Eigen::VectorXd gx, gw;
  gauss_legendre(per_panel, 0.0, panel, gx, gw);
  DiscreteMeasure m;
  m.t.resize(panels * per_panel);
  m.u.resize(panels * per_panel);
  for (int p = 0; p < panels; ++p) {
    for (int i = 0; i < per_panel; ++i) {
      const double r = p * panel + gx[i];
      m.t[p * per_panel + i] = r;
      m.u[p * per_panel + i] = gw[i] * std::exp(-r * r);
    }
  }
  return m;
}

}  // namespace

HalfLineRule halfline_quadrature(int order) {
  if (order < 2) throw std::invalid_argument("halfline_quadrature: order must be >= 2");
  const DiscreteMeasure measure = discretize_halfline_gaussian(order);
  const Eigen::Index big = measure.t.size();

  // Stieltjes by Lanczos on diag(t) with start vector sqrt(u), fully reorthogonalized.
  Eigen::MatrixXd q(big, order);
  Eigen::VectorXd alpha(order), beta(order);
  q.col(0) = measure.u.cwiseSqrt();
  q.col(0) /= q.col(0).norm();
  beta[0] = 0.0;
  for (int k = 0; k < order; ++k) {
    Eigen::VectorXd r = measure.t.cwiseProduct(q.col(k));
    alpha[k] = q.col(k).dot(r);
    if (k + 1 == order) break;
    r -= alpha[k] * q.col(k);
    if (k > 0) r -= beta[k] * q.col(k - 1);
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd h = q.leftCols(k + 1).transpose() * r;
      r -= q.leftCols(k + 1) * h;
    }
    beta[k + 1] = r.norm();
    q.col(k + 1) = r / beta[k + 1];
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> jacobi;
  Eigen::VectorXd diag = alpha;
  Eigen::VectorXd sub = beta.tail(order - 1);
  jacobi.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);

  const long double mu0 = std::sqrt(std::numbers::pi_v<long double>) / 2.0L;
  HalfLineRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  rule.scaled_weights.resize(order);
  rule.recurrence_alpha = alpha;
  rule.recurrence_beta = sub;

  for (int j = 0; j < order; ++j) {
    long double x = jacobi.eigenvalues()[j];
    // Newton polish on the monic p_order (characteristic polynomial of the Jacobi matrix).
    for (int it = 0; it < 3; ++it) {
      long double pm = 0.0L, p0 = 1.0L, dpm = 0.0L, dp0 = 0.0L;
      for (int k = 0; k < order; ++k) {
        const long double b2 = k > 0 ? static_cast<long double>(beta[k]) * beta[k] : 0.0L;
        const long double pn = (x - alpha[k]) * p0 - b2 * pm;
        const long double dpn = p0 + (x - alpha[k]) * dp0 - b2 * dpm;
        pm = p0;
        p0 = pn;
        dpm = dp0;
        dp0 = dpn;
        // rescale the monic recurrence to avoid overflow
        const long double s = std::abs(p0) + std::abs(dp0);
        if (s > 1e300L) {
          p0 /= s;
          pm /= s;
          dp0 /= s;
          dpm /= s;
        }
      }
      if (dp0 == 0.0L) break;
      const long double step = p0 / dp0;
      x -= step;
      if (std::abs(step) < 1e-18L * (1.0L + std::abs(x))) break;
    }
    rule.nodes[j] = static_cast<double>(x);

    // Christoffel weight with e^{-x^2/2} folded into the orthonormal polynomials.
    long double sum = 0.0L;
    const long double damp = std::exp(-x * x / 2.0L);
    long double pm = 0.0L, p0 = damp / std::sqrt(mu0);
    sum += p0 * p0;
    for (int k = 0; k + 1 < order; ++k) {
      const long double bk = k > 0 ? beta[k] : 0.0L;
      const long double pn = ((x - alpha[k]) * p0 - bk * pm) / beta[k + 1];
      pm = p0;
      p0 = pn;
      sum += p0 * p0;
    }
    const long double scaled = 1.0L / sum;
    rule.scaled_weights[j] = static_cast<double>(scaled);
    rule.weights[j] = static_cast<double>(scaled * std::exp(-x * x));
  }
  return rule;
}

std::shared_ptr<const HalfLineRule> cached_halfline_quadrature(int order) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const HalfLineRule>> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(order); it != cache.end()) return it->second;
  }
  auto rule = std::make_shared<const HalfLineRule>(halfline_quadrature(order));
  std::lock_guard lock(mutex);
  return cache.emplace(order, std::move(rule)).first->second;
}

}  // namespace ymm
