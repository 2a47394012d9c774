#include "ymm/oracle6d.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

namespace ymm {

namespace {

using Occupation = std::array<int, 6>;

enum class Ladder { X, PT };  // x = (a + a^+)/sqrt2, pt = (a^+ - a)/sqrt2, p = i pt

struct Factor {
  Ladder op;
  int mode;
};

struct ChainTerm {
  double coef;
  std::vector<Factor> factors;  // applied right to left
};

int mode(int i, int a) { return 3 * i + a; }

std::uint64_t key(const Occupation& s) {
  std::uint64_t k = 0;
  for (int m = 5; m >= 0; --m) k = (k << 10) | std::uint64_t(s[m]);
  return k;
}

void apply_chain(const ChainTerm& t, const Occupation& s, std::vector<std::pair<Occupation, double>>& out) {
  out.assign(1, {s, t.coef});
  std::vector<std::pair<Occupation, double>> next;
  for (auto f = t.factors.rbegin(); f != t.factors.rend(); ++f) {
    next.clear();
    for (const auto& [st, c] : out) {
      const int n = st[f->mode];
      if (n > 0) {
        Occupation lo = st;
        --lo[f->mode];
        next.emplace_back(lo, c * std::sqrt(0.5 * n) * (f->op == Ladder::X ? 1.0 : -1.0));
      }
      Occupation hi = st;
      ++hi[f->mode];
      next.emplace_back(hi, c * std::sqrt(0.5 * (n + 1)));
    }
    std::swap(out, next);
  }
}

SparseMatrixD build(const FockBasis& basis, const std::vector<ChainTerm>& terms) {
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<std::pair<Occupation, double>> out;
  for (Eigen::Index j = 0; j < basis.dim(); ++j)
    for (const ChainTerm& t : terms) {
      apply_chain(t, basis.states[j], out);
      for (const auto& [st, c] : out) {
        const Eigen::Index i = basis.index(st);
        if (i >= 0) trip.emplace_back(i, j, c);
      }
    }
  SparseMatrixD m(basis.dim(), basis.dim());
  m.setFromTriplets(trip.begin(), trip.end());
  m.prune(1.0, 1e-14);
  m.makeCompressed();
  return m;
}

double max_abs(const SparseMatrixD& m) {
  double r = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrixD::InnerIterator it(m, k); it; ++it) r = std::max(r, std::abs(it.value()));
  return r;
}

double max_abs(const SparseMatrixC& m) {
  double r = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrixC::InnerIterator it(m, k); it; ++it) r = std::max(r, std::abs(it.value()));
  return r;
}

const int kEps[3][3][3] = {{{0, 0, 0}, {0, 0, 1}, {0, -1, 0}},
                           {{0, 0, -1}, {0, 0, 0}, {1, 0, 0}},
                           {{0, 1, 0}, {-1, 0, 0}, {0, 0, 0}}};

}  // namespace

Eigen::Index FockCutoff::dim() const {
  Eigen::Index r = 1;
  for (int k = 1; k <= 6; ++k) r = r * (Nmax + k) / k;
  return r;
}

void FockCutoff::validate() const {
  if (Nmax < 2) throw std::invalid_argument("oracle.Nmax: must be >= 2, got " + std::to_string(Nmax));
  if (Nmax > 1000 || dim() > max_dimension)
    throw std::invalid_argument("oracle.Nmax: Fock dimension " + std::to_string(dim()) + " exceeds budget " +
                                std::to_string(max_dimension));
}

Eigen::Index FockBasis::index(const Occupation& s) const {
  int total = 0;
  for (int n : s) total += n;
  if (total > Nmax()) return -1;
  const std::uint64_t k = key(s);
  const auto lo = std::lower_bound(table_.begin(), table_.end(), Eigen::Index(k));
  if (lo == table_.end() || *lo != Eigen::Index(k)) return -1;
  return order_[std::size_t(lo - table_.begin())];
}

FockBasis make_fock_basis(const FockCutoff& cutoff) {
  cutoff.validate();
  FockBasis b;
  b.states.reserve(std::size_t(cutoff.dim()));
  Occupation s{};
  auto fill = [&](auto&& self, int m, int left) -> void {
    if (m == 5) {
      s[5] = left;
      b.states.push_back(s);
      return;
    }
    for (int n = left; n >= 0; --n) {
      s[m] = n;
      self(self, m + 1, left - n);
    }
  };
  for (int N = 0; N <= cutoff.Nmax; ++N) {
    b.offsets.push_back(b.dim());
    fill(fill, 0, N);
  }
  b.offsets.push_back(b.dim());
  std::vector<std::pair<Eigen::Index, Eigen::Index>> keyed;
  keyed.reserve(b.states.size());
  for (Eigen::Index i = 0; i < b.dim(); ++i) keyed.emplace_back(Eigen::Index(key(b.states[i])), i);
  std::sort(keyed.begin(), keyed.end());
  for (const auto& [k, i] : keyed) {
    b.table_.push_back(k);
    b.order_.push_back(i);
  }
  return b;
}

SparseMatrixD build_direct_hamiltonian(const FockBasis& basis) {
  std::vector<ChainTerm> terms;
  for (int i = 0; i < 2; ++i)
    for (int a = 0; a < 3; ++a) terms.push_back({-1.0, {{Ladder::PT, mode(i, a)}, {Ladder::PT, mode(i, a)}}});
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      if (a == b) continue;
      terms.push_back({1.0,
                       {{Ladder::X, mode(0, a)}, {Ladder::X, mode(0, a)}, {Ladder::X, mode(1, b)},
                        {Ladder::X, mode(1, b)}}});
      terms.push_back({-1.0,
                       {{Ladder::X, mode(0, a)}, {Ladder::X, mode(1, a)}, {Ladder::X, mode(0, b)},
                        {Ladder::X, mode(1, b)}}});
    }
  return build(basis, terms);
}

SparseMatrixD build_direct_hamiltonian(const FockCutoff& cutoff) {
  return build_direct_hamiltonian(make_fock_basis(cutoff));
}

SparseMatrixC GaugeGenerators::V(int a) const {
  return SparseMatrixC(W.at(std::size_t(a)).cast<std::complex<double>>() * std::complex<double>(0.0, 1.0));
}

SparseMatrixD GaugeGenerators::casimir() const {
  SparseMatrixD c = -(W[0] * W[0]);
  c -= W[1] * W[1];
  c -= W[2] * W[2];
  c.prune(1.0, 1e-14);
  return c;
}

GaugeGenerators build_gauge_generators(const FockBasis& basis) {
  GaugeGenerators g;
  for (int a = 0; a < 3; ++a) {
    std::vector<ChainTerm> terms;
    for (int i = 0; i < 2; ++i)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c)
          if (kEps[a][b][c] != 0)
            terms.push_back({double(kEps[a][b][c]), {{Ladder::X, mode(i, b)}, {Ladder::PT, mode(i, c)}}});
    g.W[std::size_t(a)] = build(basis, terms);
  }
  return g;
}

GaugeGenerators build_gauge_generators(const FockCutoff& cutoff) {
  return build_gauge_generators(make_fock_basis(cutoff));
}

SparseMatrixD build_rotation_generator(const FockBasis& basis) {
  std::vector<ChainTerm> terms;
  for (int a = 0; a < 3; ++a) {
    terms.push_back({1.0, {{Ladder::X, mode(0, a)}, {Ladder::PT, mode(1, a)}}});
    terms.push_back({-1.0, {{Ladder::X, mode(1, a)}, {Ladder::PT, mode(0, a)}}});
  }
  return build(basis, terms);
}

SingletSpace singlet_space(const FockBasis& basis, const GaugeGenerators& gauge) {
  const SparseMatrixD c = gauge.casimir();
  SingletSpace out;
  out.casimir.resize(basis.dim());
  std::vector<Eigen::VectorXd> cols;
  for (std::size_t N = 0; N + 1 < basis.offsets.size(); ++N) {
    const Eigen::Index o = basis.offsets[N], n = basis.offsets[N + 1] - o;
    const Eigen::MatrixXd block = Eigen::MatrixXd(c.block(o, o, n, n));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block);
    if (es.info() != Eigen::Success) throw std::runtime_error("singlet_space: Casimir diagonalization failed");
    out.casimir.segment(o, n) = es.eigenvalues();
    int count = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (es.eigenvalues()[j] >= 0.5) continue;
      Eigen::VectorXd v = Eigen::VectorXd::Zero(basis.dim());
      v.segment(o, n) = es.eigenvectors().col(j);
      cols.push_back(v);
      ++count;
    }
    out.per_level.push_back(count);
  }
  std::sort(out.casimir.data(), out.casimir.data() + out.casimir.size());
  if (cols.empty()) throw std::runtime_error("singlet_space: empty singlet space");
  out.basis.resize(basis.dim(), Eigen::Index(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.basis.col(Eigen::Index(j)) = cols[j];
  return out;
}

SingletSpectrum singlet_spectrum(const FockCutoff& cutoff, int k, const ClassifyOptions& opt) {
  if (k < 1) throw std::invalid_argument("singlet_spectrum: k must be >= 1");
  const FockBasis basis = make_fock_basis(cutoff);
  const SparseMatrixD h = build_direct_hamiltonian(basis);
  const SingletSpace space = singlet_space(basis, build_gauge_generators(basis));
  const SparseMatrixD kgen = build_rotation_generator(basis);
  const Eigen::MatrixXd& s = space.basis;

  Eigen::MatrixXd hs = s.transpose() * (h * s);
  hs = 0.5 * (hs + hs.transpose()).eval();
  const Eigen::MatrixXd ks = kgen * s;
  // L^2 = -K^2 = K^T K on the (K-invariant) singlet space
  Eigen::MatrixXd l2 = ks.transpose() * ks;
  l2 = 0.5 * (l2 + l2.transpose()).eval();

  const EigenResult eig = dense_full_spectrum(hs);
  const Classification cls =
      classify_charge(eig, [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) { out = l2 * v; }, opt);
  std::vector<SpectralRecord> recs = cls.records;
  std::stable_sort(recs.begin(), recs.end(),
                   [](const SpectralRecord& a, const SpectralRecord& b) { return a.E < b.E; });
  recs = enumerate_levels(recs);
  std::stable_sort(recs.begin(), recs.end(),
                   [](const SpectralRecord& a, const SpectralRecord& b) { return a.E < b.E; });
  if (int(recs.size()) > k) recs.resize(std::size_t(k));

  SingletSpectrum out;
  out.Nmax = cutoff.Nmax;
  out.dim = basis.dim();
  out.singlets = space.count();
  out.vacuum_energy = h.coeff(0, 0) / 4.0;
  out.records = std::move(recs);
  return out;
}

OracleDiagnostics oracle_diagnostics(const FockCutoff& cutoff) {
  const FockBasis basis = make_fock_basis(cutoff);
  const SparseMatrixD h = build_direct_hamiltonian(basis);
  const GaugeGenerators g = build_gauge_generators(basis);
  const SparseMatrixD kgen = build_rotation_generator(basis);
  OracleDiagnostics d;
  d.Nmax = cutoff.Nmax;
  d.hermiticity = max_abs(SparseMatrixD(h - SparseMatrixD(h.transpose())));
  for (int a = 0; a < 3; ++a) {
    d.gauge_commutator = std::max(d.gauge_commutator, max_abs(SparseMatrixD(h * g.W[a] - g.W[a] * h)));
    const int b = (a + 1) % 3, c = (a + 2) % 3;
    const SparseMatrixC va = g.V(a), vb = g.V(b), vc = g.V(c);
    d.algebra = std::max(d.algebra, max_abs(SparseMatrixC(va * vb - vb * va - vc * std::complex<double>(0.0, 1.0))));
    d.vacuum_annihilation = std::max(d.vacuum_annihilation, Eigen::VectorXd(g.W[a].col(0)).norm());
  }
  d.rotation_commutator = max_abs(SparseMatrixD(h * kgen - kgen * h));
  return d;
}

CrossCheckReport cross_check(const std::vector<int>& cutoffs, const std::vector<SpectralRecord>& reduced, int k,
                             double rel_tol, int threads) {
  if (cutoffs.empty()) throw std::invalid_argument("cross_check: no cutoffs");
  if (int(reduced.size()) < k) throw std::invalid_argument("cross_check: fewer reduced records than k");
  std::vector<int> sorted = cutoffs;
  std::sort(sorted.begin(), sorted.end());
  std::vector<SingletSpectrum> spectra(sorted.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i = next++; i < sorted.size(); i = next++) spectra[i] = singlet_spectrum(FockCutoff{sorted[i]}, k);
  };
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<int>(threads, int(sorted.size())); ++t) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  std::vector<SpectralRecord> red = reduced;
  std::stable_sort(red.begin(), red.end(), [](const SpectralRecord& a, const SpectralRecord& b) { return a.E < b.E; });
  CrossCheckReport r;
  r.rel_tol = rel_tol;
  r.E0_reduced = red.front().E;
  r.variational_bound = true;
  for (const SingletSpectrum& s : spectra) {
    CutoffSummary c;
    c.Nmax = s.Nmax;
    c.dim = s.dim;
    c.singlets = s.singlets;
    c.E0_direct = s.records.front().E;
    c.ground_diff = std::abs(c.E0_direct - r.E0_reduced);
    c.vacuum_energy = s.vacuum_energy;
    r.variational_bound = r.variational_bound && c.E0_direct <= c.vacuum_energy && r.E0_reduced <= c.vacuum_energy;
    r.sweep.push_back(c);
  }
  r.ground_diff_nonincreasing = true;
  for (std::size_t i = 1; i < r.sweep.size(); ++i)
    r.ground_diff_nonincreasing = r.ground_diff_nonincreasing && r.sweep[i].ground_diff <= r.sweep[i - 1].ground_diff + 1e-8;

  const SingletSpectrum& top = spectra.back();
  if (int(top.records.size()) < k) throw std::invalid_argument("cross_check: fewer singlet levels than k");
  r.labels_match = r.within_tolerance = true;
  for (int i = 0; i < k; ++i) {
    CrossCheckLevel l;
    l.level = i;
    l.E_reduced = red[std::size_t(i)].E;
    l.E_direct = top.records[std::size_t(i)].E;
    l.q_reduced = red[std::size_t(i)].q_abs;
    l.q_direct = top.records[std::size_t(i)].q_abs;
    l.diff = std::abs(l.E_direct - l.E_reduced) / std::abs(l.E_reduced);
    r.labels_match = r.labels_match && l.q_reduced == l.q_direct;
    r.within_tolerance = r.within_tolerance && l.diff < rel_tol;
    r.levels.push_back(l);
  }
  return r;
}

CrossCheckReport cross_check(const std::vector<int>& cutoffs, const ModelSpec& spec, int k, const EigenRequest& req,
                             double rel_tol) {
  const EigenResult eig = lowest_eigenpairs(assemble_4h(spec), req);
  std::vector<SpectralRecord> recs =
      analyze_spectrum(eig, assemble_charge_squared(spec), size_operator(spec));
  CrossCheckReport r = cross_check(cutoffs, recs, k, rel_tol, req.threads);
  r.reduced = {{"h0", spec.radial.h0}, {"l0", spec.angular.l0}, {"k", req.k}, {"tol", req.tol}};
  return r;
}

nlohmann::json to_json(const SingletSpectrum& s) {
  nlohmann::json levels = nlohmann::json::array();
  for (const SpectralRecord& r : s.records)
    levels.push_back({{"E", r.E}, {"q", r.q_abs}, {"q_quality", r.q_quality}, {"n", r.n}});
  return {{"Nmax", s.Nmax}, {"dim", s.dim}, {"singlets", s.singlets}, {"vacuum_energy", s.vacuum_energy},
          {"levels", levels}};
}

nlohmann::json to_json(const OracleDiagnostics& d) {
  return {{"Nmax", d.Nmax},
          {"hermiticity", d.hermiticity},
          {"gauge_commutator", d.gauge_commutator},
          {"algebra", d.algebra},
          {"rotation_commutator", d.rotation_commutator},
          {"vacuum_annihilation", d.vacuum_annihilation}};
}

nlohmann::json to_json(const CrossCheckReport& r) {
  nlohmann::json sweep = nlohmann::json::array(), levels = nlohmann::json::array();
  for (const CutoffSummary& c : r.sweep)
    sweep.push_back({{"Nmax", c.Nmax},
                     {"dim", c.dim},
                     {"singlets", c.singlets},
                     {"E0_direct", c.E0_direct},
                     {"ground_diff", c.ground_diff},
                     {"vacuum_energy", c.vacuum_energy}});
  for (const CrossCheckLevel& l : r.levels)
    levels.push_back({{"level", l.level},
                      {"E_reduced", l.E_reduced},
                      {"E_direct", l.E_direct},
                      {"q_reduced", l.q_reduced},
                      {"q_direct", l.q_direct},
                      {"diff", l.diff}});
  return {{"sweep", sweep},
          {"levels", levels},
          {"E0_reduced", r.E0_reduced},
          {"rel_tol", r.rel_tol},
          {"ground_diff_nonincreasing", r.ground_diff_nonincreasing},
          {"labels_match", r.labels_match},
          {"within_tolerance", r.within_tolerance},
          {"variational_bound", r.variational_bound},
          {"passed", r.passed()},
          {"reduced", r.reduced}};
}

}  // namespace ymm
