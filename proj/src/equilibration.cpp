#include "ymm/equilibration.hpp"

#include "ymm/random.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <thread>

namespace ymm {

namespace {

using cd = std::complex<double>;

}  // namespace

void MicrocanonicalWindow::validate() const {
  if (indices.empty()) throw std::invalid_argument("window: d_Delta must be >= 1");
  if (indices.size() != energies.size()) throw std::invalid_argument("window: indices and energies differ in length");
  for (std::size_t i = 1; i < indices.size(); ++i)
    if (indices[i] != indices[i - 1] + 1) throw std::invalid_argument("window: indices are not consecutive");
  for (double e : energies)
    if (e < E - 1e-12 * std::max(1.0, std::abs(E)) || e > E + Delta + 1e-12 * std::max(1.0, std::abs(E + Delta)))
      throw std::invalid_argument("window: energy outside [E, E + Delta]");
}

std::vector<SpectralRecord> sector_levels(const std::vector<SpectralRecord>& records, int q_abs) {
  std::map<int, SpectralRecord> by_n;
  for (const SpectralRecord& r : records) {
    if (r.q_abs != q_abs) continue;
    if (r.n < 0) throw std::invalid_argument("sector_levels: records not enumerated");
    auto it = by_n.find(r.n);
    if (it == by_n.end() || r.E < it->second.E || (r.E == it->second.E && r.column < it->second.column))
      by_n[r.n] = r;
  }
  std::vector<SpectralRecord> out;
  for (const auto& [n, r] : by_n) out.push_back(r);
  return out;
}

MicrocanonicalWindow extract_window(const std::vector<SpectralRecord>& records, int q_abs, double E, double Delta) {
  if (!(Delta >= 0.0)) throw std::invalid_argument("extract_window: Delta must be >= 0");
  MicrocanonicalWindow w;
  w.E = E;
  w.Delta = Delta;
  w.q_abs = q_abs;
  for (const SpectralRecord& r : sector_levels(records, q_abs))
    if (r.E >= E && r.E <= E + Delta) {
      w.indices.push_back(r.n);
      w.energies.push_back(r.E);
    }
  w.validate();
  return w;
}

MicrocanonicalWindow window_by_index(const std::vector<SpectralRecord>& records, int q_abs, int n_start, int d) {
  if (d < 1) throw std::invalid_argument("window_by_index: d must be >= 1");
  const std::vector<SpectralRecord> levels = sector_levels(records, q_abs);
  MicrocanonicalWindow w;
  w.q_abs = q_abs;
  for (const SpectralRecord& r : levels)
    if (r.n >= n_start && r.n < n_start + d) {
      w.indices.push_back(r.n);
      w.energies.push_back(r.E);
    }
  if (w.d() != d)
    throw std::invalid_argument("window_by_index: sector q=" + std::to_string(q_abs) + " has no levels n=" +
                                std::to_string(n_start) + ".." + std::to_string(n_start + d - 1));
  w.E = w.energies.front();
  w.Delta = w.energies.back() - w.energies.front();
  w.validate();
  return w;
}

void AmplitudeVector::validate() const {
  if (c.size() != energies.size()) throw std::invalid_argument("amplitudes: c and energies differ in length");
  if (c.size() == 0) throw std::invalid_argument("amplitudes: empty");
  if (std::abs(c.squaredNorm() - 1.0) > 1e-12) throw std::invalid_argument("amplitudes: not normalized");
}

AmplitudeVector AmplitudeVector::uniform(const Eigen::VectorXd& energies) {
  AmplitudeVector a;
  a.energies = energies;
  a.c = Eigen::VectorXcd::Constant(energies.size(), cd(1.0 / std::sqrt(double(energies.size())), 0.0));
  return a;
}

namespace {

void require_distinct(const Eigen::VectorXd& e, double tol, const char* who) {
  std::vector<double> s(e.data(), e.data() + e.size());
  std::sort(s.begin(), s.end());
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i] - s[i - 1] <= tol)
      throw std::invalid_argument(std::string(who) + ": degenerate energies (merge them first)");
}

}  // namespace

Eigen::VectorXd time_averaged_state(const AmplitudeVector& amps, double tol) {
  amps.validate();
  require_distinct(amps.energies, tol, "time_averaged_state");
  return amps.c.cwiseAbs2();
}

AmplitudeVector merge_degenerate(const AmplitudeVector& amps, double tol, int* merged) {
  std::vector<Eigen::Index> order(amps.c.size());
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return amps.energies[a] < amps.energies[b]; });
  std::vector<double> e, w;
  int count = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double ei = amps.energies[order[i]];
    const double wi = std::norm(amps.c[order[i]]);
    if (!e.empty() && ei - e.back() <= tol) {
      w.back() += wi;
      ++count;
    } else {
      e.push_back(ei);
      w.push_back(wi);
    }
  }
  if (merged) *merged = count;
  AmplitudeVector out;
  out.energies = Eigen::Map<Eigen::VectorXd>(e.data(), Eigen::Index(e.size()));
  out.c.resize(Eigen::Index(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i) out.c[Eigen::Index(i)] = std::sqrt(w[i]);
  return out;
}

double effective_dimension(const Eigen::VectorXd& weights) { return 1.0 / weights.squaredNorm(); }

double effective_dimension(const AmplitudeVector& amps) {
  amps.validate();
  return effective_dimension(Eigen::VectorXd(amps.c.cwiseAbs2()));
}

HaarStats haar_microcanonical_stats(int d, int samples, std::uint64_t seed, int threads) {
  if (d < 1) throw std::invalid_argument("haar: d must be >= 1");
  if (samples < 100) throw std::invalid_argument("haar: samples must be >= 100");
  if (threads < 1) throw std::invalid_argument("haar: threads must be >= 1");
  std::vector<double> purity(samples);
  auto work = [&](int first, int stride) {
    std::vector<double> p(d);
    for (int i = first; i < samples; i += stride) {
      std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
      std::normal_distribution<double> g;
      double total = 0.0;
      for (int k = 0; k < d; ++k) {
        const double re = g(rng), im = g(rng);
        p[k] = re * re + im * im;
        total += p[k];
      }
      double s = 0.0;
      for (int k = 0; k < d; ++k) {
        const double pk = p[k] / total;
        s += pk * pk;
      }
      purity[i] = s;
    }
  };
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (std::thread& t : pool) t.join();
  }
  // fixed-order reduction keeps the result independent of the thread count
  double sp = 0.0, sp2 = 0.0, sd = 0.0, sd2 = 0.0;
  for (double p : purity) {
    sp += p;
    sp2 += p * p;
    const double de = 1.0 / p;
    sd += de;
    sd2 += de * de;
  }
  const double n = samples;
  HaarStats h;
  h.d = d;
  h.samples = samples;
  h.seed = seed;
  h.mean_purity = sp / n;
  h.mean_deff = sd / n;
  h.se_purity = std::sqrt(std::max(0.0, (sp2 / n - h.mean_purity * h.mean_purity) / (n - 1)));
  h.se_deff = std::sqrt(std::max(0.0, (sd2 / n - h.mean_deff * h.mean_deff) / (n - 1)));
  h.deff_bound = h.mean_deff >= (1.0 + d) / 2.0;
  return h;
}

DeffEstimate microcanonical_deff_estimate(const ReggeFit& fit, double E, double Delta, int q_abs) {
  (void)q_abs;  // the fitted law has the same n-slope in every sector
  const ReggeParams& p = fit.params;
  if (!(p.c > 0.0)) throw std::invalid_argument("microcanonical_deff_estimate: fit parameter c must be > 0");
  if (!(E + p.E0 > 0.0)) throw std::invalid_argument("microcanonical_deff_estimate: E + E0 must be > 0");
  DeffEstimate d;
  d.d_delta = p.alpha * Delta * std::pow(E + p.E0, p.alpha - 1.0) / p.c;
  d.deff_bound = 0.5 * d.d_delta + 0.5;
  return d;
}

bool EquilibrationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& kv) { return kv.second; });
}

double default_horizon(const Eigen::VectorXd& energies) {
  std::vector<double> s(energies.data(), energies.data() + energies.size());
  std::sort(s.begin(), s.end());
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i] > s[i - 1]) g = std::min(g, s[i] - s[i - 1]);
  if (!std::isfinite(g)) throw std::invalid_argument("default_horizon: need two distinct energies");
  return 1e4 / g;
}

std::vector<double> time_grid(double horizon, int samples) {
  if (samples < 2) throw std::invalid_argument("time_grid: need >= 2 samples");
  if (!(horizon > 0.0)) throw std::invalid_argument("time_grid: horizon must be > 0");
  std::vector<double> t(samples);
  for (int k = 0; k < samples; ++k) t[k] = horizon * double(k) / double(samples - 1);
  return t;
}

EquilibrationReport slow_observable_trajectory(const MicrocanonicalWindow& window, const std::vector<double>& t_grid) {
  window.validate();
  const int d = window.d();
  if (d < 2) throw std::invalid_argument("slow_observable_trajectory: d_Delta must be >= 2");
  Eigen::MatrixXd o = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i + 1 < d; ++i) o(i, i + 1) = o(i + 1, i) = 1.0;
  const double norm = 2.0 * std::cos(M_PI / (d + 1));
  std::vector<double> gaps(d - 1);
  for (int i = 0; i + 1 < d; ++i) gaps[i] = window.energies[i + 1] - window.energies[i];
  double g2 = 0.0;
  for (double g : gaps) g2 += g * g;

  EquilibrationReport r;
  r.kind = "slow_observable";
  r.d_eff = d;
  r.horizon = t_grid.empty() ? 0.0 : *std::max_element(t_grid.begin(), t_grid.end());
  Eigen::VectorXcd psi(d);
  bool certified = true;
  double worst = std::numeric_limits<double>::infinity();
  for (double t : t_grid) {
    for (int i = 0; i < d; ++i) psi[i] = std::polar(1.0 / std::sqrt(double(d)), -window.energies[i] * t);
    // Tr O omega = 0 since O has no diagonal
    const double dev = std::abs(psi.dot(o.cast<cd>() * psi)) / norm;
    double cert = 0.0;
    for (double g : gaps) cert += std::cos(g * t);
    cert /= d;
    r.times.push_back(t);
    r.deviation.push_back(dev);
    r.bound.push_back(cert);
    r.quadratic_bound.push_back(1.0 - g2 * t * t / (2.0 * d));
    certified = certified && dev >= cert - 1e-12;
    worst = std::min(worst, dev - cert);
  }
  r.checks["certified_bound_holds"] = certified;
  const auto zero = std::find(t_grid.begin(), t_grid.end(), 0.0);
  if (zero != t_grid.end()) {
    const std::size_t k = std::size_t(zero - t_grid.begin());
    r.checks["certified_t0"] = std::abs(r.bound[k] - double(d - 1) / d) <= 1e-12;
    r.checks["exact_t0"] = std::abs(r.deviation[k] - (2.0 * (d - 1) / d) / norm) <= 1e-12;
  }
  r.extra["norm_exact"] = norm;
  r.extra["norm_bound"] = 2.0;
  r.extra["min_margin"] = worst;
  r.extra["quadratic_coefficient"] = g2 / (2.0 * d);
  std::vector<double> bound_norm(r.deviation.size());
  for (std::size_t i = 0; i < bound_norm.size(); ++i) bound_norm[i] = r.deviation[i] * norm / 2.0;
  r.extra["deviation_norm_bound"] = bound_norm;
  r.mean_deviation =
      r.deviation.empty() ? 0.0 : std::accumulate(r.deviation.begin(), r.deviation.end(), 0.0) / r.deviation.size();
  return r;
}

double quadratic_shrinkage(const MicrocanonicalWindow& window) {
  window.validate();
  double g2 = 0.0;
  for (int i = 0; i + 1 < window.d(); ++i) {
    const double g = window.energies[i + 1] - window.energies[i];
    g2 += g * g;
  }
  return g2 / (2.0 * window.d());
}

double predicted_shrinkage(const ReggeFit& fit, double E, int d) {
  const ReggeParams& p = fit.params;
  if (d < 1) throw std::invalid_argument("predicted_shrinkage: d must be >= 1");
  return p.c * p.c * (d - 1) / (2.0 * p.alpha * p.alpha * d) / std::pow(E + p.E0, 2.0 * (p.alpha - 1.0));
}

EquilibrationReport observable_equilibration_check(const AmplitudeVector& amps, const Eigen::MatrixXcd& a,
                                                   double horizon, int samples, double slack) {
  amps.validate();
  const Eigen::Index d = amps.c.size();
  if (a.rows() != d || a.cols() != d) throw std::invalid_argument("observable_equilibration_check: A not d x d");
  if (!((a - a.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff())))
    throw std::invalid_argument("observable_equilibration_check: A not Hermitian");
  const Eigen::VectorXd w = time_averaged_state(amps);
  const double deff = effective_dimension(w);
  const double norm = Eigen::JacobiSVD<Eigen::MatrixXcd>(a).singularValues()[0];
  cd avg(0.0, 0.0);
  for (Eigen::Index n = 0; n < d; ++n) avg += w[n] * a(n, n);

  EquilibrationReport r;
  r.kind = "observable";
  r.d_eff = deff;
  r.horizon = horizon;
  r.bound_value = norm * norm / deff;
  Eigen::VectorXcd psi(d);
  double sum = 0.0;
  for (double t : time_grid(horizon, samples)) {
    for (Eigen::Index n = 0; n < d; ++n) psi[n] = amps.c[n] * std::polar(1.0, -amps.energies[n] * t);
    const double dev = std::norm(psi.dot(a * psi) - avg);
    r.times.push_back(t);
    r.deviation.push_back(dev);
    r.bound.push_back(r.bound_value);
    sum += dev;
  }
  r.mean_deviation = sum / samples;
  r.checks["bound_holds"] = r.mean_deviation <= r.bound_value * (1.0 + slack);
  r.extra["norm"] = norm;
  r.extra["slack"] = slack;
  return r;
}

Eigen::Index Bipartition::total() const {
  Eigen::Index n = 1;
  for (int d : dims) n *= d;
  return n;
}

void Bipartition::validate() const {
  if (dims.empty()) throw std::invalid_argument("bipartition: no registers");
  for (int d : dims)
    if (d < 1) throw std::invalid_argument("bipartition: register dimensions must be >= 1");
  if (subsystem < 0 || subsystem >= int(dims.size())) throw std::invalid_argument("bipartition: subsystem out of range");
}

Eigen::MatrixXcd partial_trace(const Eigen::VectorXcd& psi, const Bipartition& bp) {
  bp.validate();
  if (psi.size() != bp.total()) throw std::invalid_argument("partial_trace: vector length does not match registers");
  Eigen::Index stride = 1;
  for (int i = 0; i < bp.subsystem; ++i) stride *= bp.dims[i];
  const Eigen::Index ds = bp.dims[bp.subsystem];
  const Eigen::Index db = psi.size() / ds;
  Eigen::MatrixXcd m(ds, db);
  for (Eigen::Index idx = 0; idx < psi.size(); ++idx) {
    const Eigen::Index s = (idx / stride) % ds;
    const Eigen::Index rest = idx % stride + (idx / (stride * ds)) * stride;
    m(s, rest) = psi[idx];
  }
  return m * m.adjoint();
}

double trace_norm(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

EquilibrationReport subsystem_equilibration_check(const EigenResult& full, const Bipartition& bp,
                                                  const Eigen::VectorXcd& psi0, double horizon, int samples,
                                                  double slack, double degeneracy_tol, Eigen::Index max_dense) {
  bp.validate();
  const Eigen::Index n = bp.total();
  if (n > max_dense) throw std::invalid_argument("subsystem_equilibration_check: dimension too large for dense path");
  if (full.eigenvectors.rows() != n || full.eigenvectors.cols() != n)
    throw std::invalid_argument("subsystem_equilibration_check: full eigendecomposition required");
  if (std::abs(psi0.squaredNorm() - 1.0) > 1e-12)
    throw std::invalid_argument("subsystem_equilibration_check: initial vector not normalized");
  const Eigen::VectorXcd c = full.eigenvectors.transpose().cast<cd>() * psi0;

  // dephased components: one projected vector per energy group
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return full.eigenvalues[a] < full.eigenvalues[b]; });
  std::vector<double> energy;
  std::vector<Eigen::VectorXcd> phi;
  int merged = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index col = order[i];
    const Eigen::VectorXcd part = c[col] * full.eigenvectors.col(col).cast<cd>();
    if (!energy.empty() && full.eigenvalues[col] - energy.back() <= degeneracy_tol) {
      phi.back() += part;
      ++merged;
    } else {
      energy.push_back(full.eigenvalues[col]);
      phi.push_back(part);
    }
  }
  double purity = 0.0;
  Eigen::MatrixXcd omega_s = Eigen::MatrixXcd::Zero(bp.dims[bp.subsystem], bp.dims[bp.subsystem]);
  std::vector<std::size_t> active;
  for (std::size_t g = 0; g < phi.size(); ++g) {
    const double wg = phi[g].squaredNorm();
    if (wg == 0.0) continue;
    purity += wg * wg;
    omega_s += partial_trace(phi[g], bp);
    active.push_back(g);
  }

  EquilibrationReport r;
  r.kind = "subsystem";
  r.d_eff = 1.0 / purity;
  r.horizon = horizon;
  const double ds = bp.dims[bp.subsystem];
  r.bound_value = ds / std::sqrt(r.d_eff);
  double sum = 0.0, trace_err = 0.0, herm_err = 0.0;
  Eigen::VectorXcd psi(n);
  for (double t : time_grid(horizon, samples)) {
    psi.setZero();
    for (std::size_t g : active) psi += std::polar(1.0, -energy[g] * t) * phi[g];
    const Eigen::MatrixXcd rho = partial_trace(psi, bp);
    trace_err = std::max(trace_err, std::abs(rho.trace() - cd(1.0, 0.0)));
    herm_err = std::max(herm_err, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
    const double dist = trace_norm(rho - omega_s);
    r.times.push_back(t);
    r.deviation.push_back(dist);
    r.bound.push_back(r.bound_value);
    sum += dist;
  }
  r.mean_deviation = sum / samples;
  r.checks["bound_holds"] = r.mean_deviation <= r.bound_value * (1.0 + slack);
  r.checks["trace_preserved"] = trace_err <= 1e-10;
  r.checks["hermitian"] = herm_err <= 1e-12;
  r.extra["merged_levels"] = merged;
  r.extra["d_S"] = bp.dims[bp.subsystem];
  r.extra["slack"] = slack;
  r.extra["max_trace_error"] = trace_err;
  return r;
}

double gap_bound(const ReggeFit& fit, double E) {
  const ReggeParams& p = fit.params;
  return p.c / (p.alpha * std::pow(E + p.E0, p.alpha - 1.0));
}

GapBoundReport gap_bound_check(const std::vector<SpectralRecord>& records, const ReggeFit& fit, double E_floor) {
  if (!(fit.params.c > 0.0)) throw std::invalid_argument("gap_bound_check: fit parameter c must be > 0");
  std::set<int> sectors;
  for (const SpectralRecord& r : records) sectors.insert(r.q_abs);
  GapBoundReport out;
  for (int q : sectors) {
    const std::vector<SpectralRecord> levels = sector_levels(records, q);
    GapSector s;
    s.q_abs = q;
    s.bound_at_floor = gap_bound(fit, E_floor);
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
      if (levels[i].E < E_floor) continue;
      const double g = levels[i + 1].E - levels[i].E;
      ++s.gaps;
      s.max_gap = std::max(s.max_gap, g);
      if (g > gap_bound(fit, levels[i].E) * (1.0 + 1e-12)) ++s.violations;
    }
    if (s.gaps == 0) continue;
    out.gaps += s.gaps;
    out.violations += s.violations;
    out.sectors.push_back(s);
  }
  if (out.gaps == 0) throw std::invalid_argument("gap_bound_check: no gaps above E_floor");
  out.violation_fraction = double(out.violations) / out.gaps;
  return out;
}

nlohmann::json to_json(const HaarStats& s) {
  return {{"d", s.d},
          {"samples", s.samples},
          {"seed", s.seed},
          {"mean_deff", s.mean_deff},
          {"se_deff", s.se_deff},
          {"mean_purity", s.mean_purity},
          {"se_purity", s.se_purity},
          {"purity_haar", 2.0 / (s.d + 1.0)},
          {"deff_lower_bound", (1.0 + s.d) / 2.0},
          {"deff_bound_holds", s.deff_bound}};
}

nlohmann::json to_json(const EquilibrationReport& r) {
  nlohmann::json j;
  j["kind"] = r.kind;
  j["d_eff"] = r.d_eff;
  j["horizon"] = r.horizon;
  j["seed"] = r.seed;
  j["mean_deviation"] = r.mean_deviation;
  j["bound_value"] = r.bound_value;
  j["times"] = r.times;
  j["deviation"] = r.deviation;
  j["bound"] = r.bound;
  if (!r.quadratic_bound.empty()) j["quadratic_bound"] = r.quadratic_bound;
  j["checks"] = r.checks;
  j["passed"] = r.passed();
  j["extra"] = r.extra;
  return j;
}

nlohmann::json to_json(const GapBoundReport& r) {
  nlohmann::json sectors = nlohmann::json::array();
  for (const GapSector& s : r.sectors)
    sectors.push_back({{"q", s.q_abs},
                       {"gaps", s.gaps},
                       {"violations", s.violations},
                       {"max_gap", s.max_gap},
                       {"bound_at_floor", s.bound_at_floor}});
  return {{"sectors", sectors}, {"gaps", r.gaps}, {"violations", r.violations},
          {"violation_fraction", r.violation_fraction}};
}

nlohmann::json to_json(const MicrocanonicalWindow& w) {
  return {{"E", w.E}, {"Delta", w.Delta}, {"q", w.q_abs}, {"d", w.d()}, {"indices", w.indices},
          {"energies", w.energies}};
}

}  // namespace ymm
