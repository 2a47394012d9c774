#include "ymm/eigensolve.hpp"

#include "ymm/random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace ymm {

void EigenRequest::validate() const {
  if (k < 1) throw std::invalid_argument("solver.k: must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("solver.tol: must be > 0");
  if (max_iter < 1) throw std::invalid_argument("solver.max_iter: must be >= 1");
  if (dense_threshold < 1) throw std::invalid_argument("solver.dense_threshold: must be >= 1");
  if (max_basis != 0 && max_basis <= k) throw std::invalid_argument("solver.max_basis: must exceed k");
  if (threads < 1) throw std::invalid_argument("solver.threads: must be >= 1");
}

bool EigenResult::all_converged() const {
  return std::all_of(converged.begin(), converged.end(), [](bool c) { return c; });
}

void EigenResult::truncate(Eigen::Index n) {
  n = std::min(n, size());
  eigenvalues.conservativeResize(n);
  eigenvectors.conservativeResize(Eigen::NoChange, n);
  residuals.conservativeResize(n);
  converged.resize(n);
  parity.resize(n);
}

namespace {

Eigen::VectorXd residual_norms(const MatVec& apply, const Eigen::VectorXd& values, const Eigen::MatrixXd& vectors) {
  Eigen::VectorXd res(values.size());
  Eigen::VectorXd av;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    apply(vectors.col(i), av);
    res[i] = (av - values[i] * vectors.col(i)).norm();
  }
  return res;
}

EigenResult from_dense(const Eigen::MatrixXd& m, const char* method) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense_full_spectrum: eigensolver failed");
  EigenResult r;
  r.eigenvalues = es.eigenvalues();
  r.eigenvectors = es.eigenvectors();
  r.residuals = (m * r.eigenvectors - r.eigenvectors * r.eigenvalues.asDiagonal()).colwise().norm().transpose();
  r.converged.assign(r.eigenvalues.size(), true);
  r.parity.assign(r.eigenvalues.size(), -1);
  r.method = method;
  return r;
}

Eigen::VectorXd random_unit(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = g(rng);
  return v / v.norm();
}

// Two-pass classical Gram-Schmidt against the first `cols` columns of V.
Eigen::VectorXd orthogonalize(const Eigen::MatrixXd& v, Eigen::Index cols, Eigen::VectorXd& w) {
  Eigen::VectorXd h = v.leftCols(cols).transpose() * w;
  w.noalias() -= v.leftCols(cols) * h;
  const Eigen::VectorXd h2 = v.leftCols(cols).transpose() * w;
  w.noalias() -= v.leftCols(cols) * h2;
  return h + h2;
}

}  // namespace

EigenResult dense_full_spectrum(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("dense_full_spectrum: matrix not square");
  return from_dense(m, "dense");
}

EigenResult dense_full_spectrum(const TensorOperator& op, Eigen::Index dense_threshold) {
  if (op.dim() > dense_threshold)
    throw std::invalid_argument("dense_full_spectrum: dimension " + std::to_string(op.dim()) +
                                " exceeds dense threshold " + std::to_string(dense_threshold));
  return from_dense(materialize_dense(op, dense_threshold), "dense");
}

namespace {

// Krylov basis V (n x m+1) with projected matrix T, extended by the Lanczos
// recurrence from column `start` and thick-restarted onto its lowest Ritz vectors.
class KrylovBasis {
 public:
  KrylovBasis(Eigen::Index n, Eigen::Index m, std::mt19937_64& rng)
      : n_(n), m_(m), v_(n, m + 1), t_(Eigen::MatrixXd::Zero(m, m)), rng_(rng) {}

  void reset(const Eigen::VectorXd& v0) {
    v_.col(0) = v0 / v0.norm();
    t_.setZero();
    start_ = 0;
  }

  int extend(const MatVec& op) {
    Eigen::VectorXd w(n_);
    const int steps = static_cast<int>(m_ - start_);
    for (Eigen::Index j = start_; j < m_; ++j) {
      op(v_.col(j), w);
      const Eigen::VectorXd h = j > start_ ? recurrence_step(j, w) : orthogonalize(v_, j + 1, w);
      t_.col(j).head(j + 1) = h;
      t_.row(j).head(j + 1) = h.transpose();
      beta_ = w.norm();
      const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
      if (beta_ < 1e-13 * scale) {
        // invariant subspace; continue with a fresh direction decoupled from T
        beta_ = 0.0;
        if (j + 1 < n_) {
          for (int attempt = 0; attempt < 3; ++attempt) {
            w = random_unit(n_, rng_);
            orthogonalize(v_, j + 1, w);
            if (w.norm() > 1e-8) break;
          }
          v_.col(j + 1) = w / w.norm();
        } else {
          v_.col(j + 1).setZero();
        }
      } else {
        v_.col(j + 1) = w / beta_;
      }
    }
    es_.compute(t_);
    return steps;
  }

  const Eigen::VectorXd& values() const { return es_.eigenvalues(); }
  Eigen::VectorXd ritz_residuals() const { return (beta_ * es_.eigenvectors().row(m_ - 1)).cwiseAbs().transpose(); }
  Eigen::MatrixXd ritz_vectors(Eigen::Index cols) const { return v_.leftCols(m_) * es_.eigenvectors().leftCols(cols); }
  double beta() const { return beta_; }

  void restart(Eigen::Index keep) {
    const Eigen::VectorXd last = v_.col(m_);
    v_.leftCols(keep) = v_.leftCols(m_) * es_.eigenvectors().leftCols(keep);
    v_.col(keep) = last;
    t_.setZero();
    t_.topLeftCorner(keep, keep).diagonal() = es_.eigenvalues().head(keep);
    start_ = keep;
  }

 private:
  // Local three-term step, then a full classical Gram-Schmidt pass against
  // V(:, 0..j); a second pass only when the first removed most of the norm.
  Eigen::VectorXd recurrence_step(Eigen::Index j, Eigen::VectorXd& w) const {
    const double alpha = v_.col(j).dot(w);
    w -= alpha * v_.col(j) + beta_ * v_.col(j - 1);
    const double before = w.norm();
    Eigen::VectorXd h = v_.leftCols(j + 1).transpose() * w;
    w.noalias() -= v_.leftCols(j + 1) * h;
    if (w.norm() < M_SQRT1_2 * before) {
      const Eigen::VectorXd h2 = v_.leftCols(j + 1).transpose() * w;
      w.noalias() -= v_.leftCols(j + 1) * h2;
      h += h2;
    }
    h[j] += alpha;
    h[j - 1] += beta_;
    return h;
  }

  Eigen::Index n_, m_;
  Eigen::MatrixXd v_, t_;
  std::mt19937_64& rng_;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_;
  Eigen::Index start_ = 0;
  double beta_ = 0.0;
};

// Normalized Ritz vectors with true residuals recomputed on A.
void finish(const MatVec& apply, Eigen::Index k, const Eigen::VectorXd& values, Eigen::MatrixXd vectors,
            double tol, EigenResult& out) {
  out.eigenvalues = values.head(k);
  // re-normalize against rounding in the long recurrence
  for (Eigen::Index i = 0; i < k; ++i) vectors.col(i).normalize();
  out.eigenvectors = std::move(vectors);
  out.residuals = residual_norms(apply, out.eigenvalues, out.eigenvectors);
  out.matvecs += static_cast<int>(k);
  out.converged.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) out.converged[i] = out.residuals[i] <= tol;
  out.parity.assign(k, -1);
}

}  // namespace

EigenResult lanczos_lowest(const MatVec& apply, Eigen::Index n, const EigenRequest& req) {
  req.validate();
  const Eigen::Index k = req.k;
  if (k >= n) throw std::invalid_argument("lanczos_lowest: k must be < dimension");
  Eigen::Index m = req.max_basis > 0 ? req.max_basis : std::max<Eigen::Index>({2 * k + 40, 3 * k, 100});
  m = std::min(m, n);
  const Eigen::Index keep = std::max(k, std::min(m - 1, k + (m - k) / 2));

  std::mt19937_64 rng(req.seed);
  KrylovBasis kb(n, m, rng);
  kb.reset(random_unit(n, rng));
  EigenResult out;
  out.method = "lanczos";
  for (;;) {
    out.matvecs += kb.extend(apply);
    ++out.iterations;
    const bool done = (kb.ritz_residuals().head(k).array() <= req.tol).all() || m == n;
    if (done || out.iterations >= req.max_iter) break;
    kb.restart(keep);
  }
  finish(apply, k, kb.values(), kb.ritz_vectors(k), req.tol, out);
  return out;
}

namespace {

EigenResult solve_single(const TensorOperator& op, const EigenRequest& req) {
  const Eigen::Index n = op.dim();
  const bool dense = req.mode == SolverMode::Dense || (req.mode == SolverMode::Auto && n <= req.dense_threshold) ||
                     req.k >= n;
  if (dense) {
    EigenResult r = dense_full_spectrum(op, std::max(req.dense_threshold, req.k >= n ? n : Eigen::Index(0)));
    r.truncate(req.k);
    return r;
  }
  const int threads = req.threads;
  return lanczos_lowest([&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { apply_into(op, x, y, threads); }, n,
                        req);
}

EigenResult merge_sectors(std::vector<EigenResult>& parts, const std::vector<std::vector<int>>& levels, int h0,
                          int l0, const std::vector<bool>& complete, Eigen::Index k) {
  double cut = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < parts.size(); ++s)
    if (!complete[s] && parts[s].size() > 0) cut = std::min(cut, parts[s].eigenvalues.maxCoeff());

  struct Entry { double value; std::size_t sector; Eigen::Index col; };
  std::vector<Entry> entries;
  for (std::size_t s = 0; s < parts.size(); ++s)
    for (Eigen::Index i = 0; i < parts[s].size(); ++i)
      if (parts[s].eigenvalues[i] <= cut) entries.push_back({parts[s].eigenvalues[i], s, i});
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.value < b.value || (a.value == b.value && a.sector < b.sector);
  });
  if (Eigen::Index(entries.size()) > k) entries.resize(k);

  const Eigen::Index n = Eigen::Index(h0) * h0 * l0;
  EigenResult r;
  r.eigenvalues.resize(entries.size());
  r.eigenvectors.resize(n, entries.size());
  r.residuals.resize(entries.size());
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const EigenResult& p = parts[entries[e].sector];
    r.eigenvalues[e] = entries[e].value;
    r.eigenvectors.col(e) = embed_levels(p.eigenvectors.col(entries[e].col), h0, l0, levels[entries[e].sector]);
    r.residuals[e] = p.residuals[entries[e].col];
    r.converged.push_back(p.converged[entries[e].col]);
    r.parity.push_back(p.parity[entries[e].col]);
  }
  for (const EigenResult& p : parts) {
    r.iterations += p.iterations;
    r.matvecs += p.matvecs;
  }
  r.method = parts.empty() ? "none" : parts[0].method + "+parity";
  return r;
}

}  // namespace

EigenResult lowest_eigenpairs(const TensorOperator& op, const EigenRequest& req) {
  req.validate();
  if (op.structure() != OperatorStructure::RealSymmetric)
    throw std::invalid_argument("lowest_eigenpairs: operator must be real symmetric");
  if (req.k >= op.dim()) throw std::invalid_argument("lowest_eigenpairs: k must be < dimension");
  if (!req.split_parity) return solve_single(op, req);

  std::vector<EigenResult> parts;
  std::vector<std::vector<int>> levels;
  std::vector<bool> complete;
  for (int p = 0; p < 2; ++p) {
    std::vector<int> lv = parity_levels(op.l0(), p);
    const TensorOperator sector = restrict_levels(op, lv);
    EigenRequest sub = req;
    sub.seed = derive_seed(req.seed, static_cast<std::uint64_t>(p));
    sub.k = static_cast<int>(std::min<Eigen::Index>(req.k, sector.dim()));
    complete.push_back(sub.k == sector.dim());
    EigenResult r = solve_single(sector, sub);
    r.parity.assign(r.size(), p);
    parts.push_back(std::move(r));
    levels.push_back(std::move(lv));
  }
  return merge_sectors(parts, levels, op.h0(), op.l0(), complete, req.k);
}

EigenResult lowest_eigenpairs(const Eigen::SparseMatrix<double>& m, const EigenRequest& req) {
  req.validate();
  const Eigen::Index n = m.rows();
  if (req.k >= n) throw std::invalid_argument("lowest_eigenpairs: k must be < dimension");
  if (req.mode == SolverMode::Dense || (req.mode == SolverMode::Auto && n <= req.dense_threshold)) {
    EigenResult r = from_dense(Eigen::MatrixXd(m), "dense");
    r.truncate(req.k);
    return r;
  }
  return lanczos_lowest([&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y = m * x; }, n, req);
}

Extrapolation extrapolate_exponential(const std::array<double, 3>& x, const std::array<double, 3>& y) {
  Extrapolation e;
  e.value = y[2];
  const double a = x[1] - x[0], b = x[2] - x[1];
  const double d1 = y[0] - y[1], d2 = y[1] - y[2];
  if (!(a > 0.0 && b > 0.0) || d1 == 0.0 || d1 * d2 <= 0.0) return e;
  const double rho = d2 / d1;
  // f(g) = (e^{-g a} - e^{-g (a+b)}) / (1 - e^{-g a}); f(0+) = b/a, f(inf) = 0
  auto f = [&](double g) { return (std::exp(-g * a) - std::exp(-g * (a + b))) / (-std::expm1(-g * a)); };
  if (rho >= b / a) return e;
  double lo = 1e-12 / a, hi = 1.0 / a;
  while (f(hi) > rho) {
    hi *= 2.0;
    if (hi > 1e6 / a) return e;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > rho ? lo : hi) = mid;
  }
  const double g = 0.5 * (lo + hi);
  const double value = y[2] - d2 / std::expm1(g * b);
  if (!std::isfinite(value)) return e;
  e.value = value;
  e.gamma = g;
  e.valid = true;
  return e;
}

SweepResult truncation_sweep(const std::vector<ModelSpec>& specs, const EigenRequest& req, double stability_tol,
                             const OperatorBuilder& builder) {
  if (specs.size() < 2) throw std::invalid_argument("truncation_sweep: need at least 2 levels");
  for (std::size_t i = 1; i < specs.size(); ++i) {
    if (specs[i].radial.h0 < specs[i - 1].radial.h0 || specs[i].angular.l0 < specs[i - 1].angular.l0)
      throw std::invalid_argument("truncation_sweep: specs must have nondecreasing h0 and l0");
    if (specs[i].radial.scale != specs[i - 1].radial.scale)
      throw std::invalid_argument("truncation_sweep: nested specs must share the radial scale");
  }
  SweepResult s;
  s.stability_tol = stability_tol;
  for (const ModelSpec& spec : specs) {
    const EigenResult r = lowest_eigenpairs(builder(spec), req);
    s.levels.push_back({spec.radial.h0, spec.angular.l0, r.eigenvalues, r.residuals, r.matvecs});
  }
  s.tracked = s.levels[0].eigenvalues.size();
  for (const SweepLevel& l : s.levels) s.tracked = std::min(s.tracked, l.eigenvalues.size());
  const std::size_t nl = s.levels.size();
  s.last_delta.resize(s.tracked);
  s.extrapolated.resize(s.tracked);
  s.rate.resize(s.tracked);
  for (Eigen::Index i = 0; i < s.tracked; ++i) {
    s.last_delta[i] = s.levels[nl - 1].eigenvalues[i] - s.levels[nl - 2].eigenvalues[i];
    s.stable.push_back(std::abs(s.last_delta[i]) < stability_tol);
    bool mono = true;
    for (std::size_t l = 1; l < nl; ++l)
      mono = mono && s.levels[l].eigenvalues[i] <= s.levels[l - 1].eigenvalues[i] + 2.0 * req.tol;
    s.monotone.push_back(mono);
    Extrapolation e;
    e.value = s.levels[nl - 1].eigenvalues[i];
    if (nl >= 3) {
      std::array<double, 3> x{}, y{};
      for (int q = 0; q < 3; ++q) {
        x[q] = s.levels[nl - 3 + q].h0;
        y[q] = s.levels[nl - 3 + q].eigenvalues[i];
      }
      e = extrapolate_exponential(x, y);
    }
    s.extrapolated[i] = e.value;
    s.rate[i] = e.valid ? e.gamma : std::numeric_limits<double>::quiet_NaN();
    s.extrapolation_valid.push_back(e.valid);
  }
  return s;
}

nlohmann::json to_json(const EigenResult& r) {
  nlohmann::json j;
  j["method"] = r.method;
  j["eigenvalues"] = std::vector<double>(r.eigenvalues.data(), r.eigenvalues.data() + r.eigenvalues.size());
  j["residuals"] = std::vector<double>(r.residuals.data(), r.residuals.data() + r.residuals.size());
  j["converged"] = r.converged;
  j["parity"] = r.parity;
  j["iterations"] = r.iterations;
  j["matvecs"] = r.matvecs;
  return j;
}

nlohmann::json to_json(const SweepResult& s) {
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  nlohmann::json j;
  j["stability_tol"] = s.stability_tol;
  j["tracked"] = s.tracked;
  nlohmann::json levels = nlohmann::json::array();
  for (const SweepLevel& l : s.levels)
    levels.push_back({{"h0", l.h0}, {"l0", l.l0}, {"eigenvalues", vec(l.eigenvalues)},
                      {"residuals", vec(l.residuals)}, {"matvecs", l.matvecs}});
  j["levels"] = std::move(levels);
  j["last_delta"] = vec(s.last_delta);
  j["stable"] = s.stable;
  j["monotone"] = s.monotone;
  j["extrapolated"] = vec(s.extrapolated);
  j["extrapolation_valid"] = s.extrapolation_valid;
  nlohmann::json rate = nlohmann::json::array();
  for (Eigen::Index i = 0; i < s.rate.size(); ++i)
    rate.push_back(std::isfinite(s.rate[i]) ? nlohmann::json(s.rate[i]) : nlohmann::json(nullptr));
  j["rate"] = std::move(rate);
  return j;
}

}  // namespace ymm
