// Acceptance runner: `acceptance <criterion> [args]`, one criterion per ctest entry.
// Criteria 2, 4, 5, 6 and 8 read the desk-scale spectrum written by the
// `ymm spectrum` fixture; 10 drives the CLI binary itself.

#include "ymm/angular.hpp"
#include "ymm/commands.hpp"
#include "ymm/eigensolve.hpp"
#include "ymm/equilibration.hpp"
#include "ymm/io.hpp"
#include "ymm/model.hpp"
#include "ymm/oracle6d.hpp"
#include "ymm/radial_basis.hpp"
#include "ymm/random.hpp"
#include "ymm/regge.hpp"
#include "ymm/spectrum.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include <sys/wait.h>

using namespace ymm;
namespace fs = std::filesystem;

namespace {

class Verdict {
 public:
  explicit Verdict(std::string title) : title_(std::move(title)) {}

  void check(const std::string& what, bool ok, const std::string& detail = "") {
    std::printf("  %s %s%s%s\n", ok ? "ok  " : "FAIL", what.c_str(), detail.empty() ? "" : ": ", detail.c_str());
    all_ &= ok;
  }

  int finish() const {
    std::printf("[%s] %s\n", all_ ? "PASS" : "FAIL", title_.c_str());
    return all_ ? 0 : 1;
  }

 private:
  std::string title_;
  bool all_ = true;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Desk {
  fs::path dir;
  std::vector<SpectralRecord> records;
  nlohmann::json summary;
  RunConfig config;
};

Desk load_desk(const std::string& dir) {
  Desk d;
  d.dir = dir;
  d.records = parse_records_csv(read_file((d.dir / "spectrum.csv").string()));
  d.summary = nlohmann::json::parse(read_file((d.dir / "spectrum.json").string()));
  const nlohmann::json manifest = nlohmann::json::parse(read_file((d.dir / "spectrum.manifest.json").string()));
  d.config = parse_config(manifest["config"]);
  return d;
}

// Each sector's trajectory ends before the first level whose size expectation
// falls below its predecessor's: a level from another family has entered.
FitRegion trajectory_region(const Desk& d) {
  FitRegion region = d.config.fit.region;
  std::map<int, bool> sectors;
  for (const SpectralRecord& r : d.records) sectors[r.q_abs] = true;
  for (const auto& [q, unused] : sectors) {
    const std::vector<SpectralRecord> levels = sector_levels(d.records, q);
    for (std::size_t i = 1; i < levels.size(); ++i)
      if (levels[i].size < levels[i - 1].size) {
        region.n_cutoff[q] = std::min(region.cutoff(q), levels[i].n);
        std::printf("  trajectory cut: q=%d at n=%d (size %.4f after %.4f)\n", q, levels[i].n, levels[i].size,
                    levels[i - 1].size);
        break;
      }
  }
  return region;
}

ReggeFit desk_fit(const Desk& d, ReggeMode mode, const FitRegion& region) {
  try {
    return regge_fit(d.records, region, mode, d.config.fit.options);
  } catch (const FitError& e) {
    std::printf("  note: %s fit raised: %s\n", to_string(mode).c_str(), e.what());
    return e.best();
  }
}

int criterion1() {
  Verdict v("criterion 1: angular coupling matrix against its independent construction at l0 = 200");
  const auto t0 = std::chrono::steady_clock::now();
  const AngularSpec spec{200};
  const Eigen::MatrixXd a = a_matrix(spec).to_dense();
  const Eigen::MatrixXd b = a_matrix_oracle(spec).to_dense();
  const double elapsed = seconds_since(t0);
  const double diff = (a - b).cwiseAbs().maxCoeff();
  v.check("entrywise agreement < 1e-12", diff < 1e-12, fmt("max |diff| = %.3e", diff));
  v.check("nontrivial matrix", a.cwiseAbs().maxCoeff() > 0.1, fmt("max |entry| = %.3f", a.cwiseAbs().maxCoeff()));
  v.check("runtime < 1 s", elapsed < 1.0, fmt("%.3f s", elapsed));
  return v.finish();
}

int criterion2(const Desk& d) {
  Verdict v("criterion 2: ground state energy over the truncation sweep");
  const nlohmann::json sweep = nlohmann::json::parse(read_file((d.dir / "sweep.json").string()));
  const auto& levels = sweep["levels"];
  const std::vector<std::pair<int, int>> expected = {{16, 24}, {24, 32}, {32, 40}, {48, 64}};
  v.check("sweep levels (16,24) (24,32) (32,40) (48,64)", levels.size() == expected.size());
  const double tol = d.config.solver.tol;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double e = levels[i]["eigenvalues"][0].get<double>() / 4.0;
    std::printf("  level (%d,%d): E = %.10f\n", levels[i]["h0"].get<int>(), levels[i]["l0"].get<int>(), e);
    if (i < expected.size())
      v.check("level order", levels[i]["h0"] == expected[i].first && levels[i]["l0"] == expected[i].second);
    if (i + 1 < levels.size()) {
      const double next = levels[i + 1]["eigenvalues"][0].get<double>() / 4.0;
      v.check("nonincreasing into the next level", e >= next - 2.0 * tol, fmt("%.10f -> %.10f", e, next));
    }
  }
  const double ext = sweep["extrapolated"][0].get<double>() / 4.0;
  std::printf("  extrapolation valid: %s\n", sweep["extrapolation_valid"][0].get<bool>() ? "yes" : "no (last value)");
  v.check("extrapolated ground state within 1e-2 of 1.05535", std::abs(ext - 1.05535) < 1e-2,
          fmt("E_inf = %.8f, diff = %.2e", ext, std::abs(ext - 1.05535)));
  return v.finish();
}

int criterion3() {
  Verdict v("criterion 3: radial matrix elements");
  const RadialBasisSpec spec{64, 0, 1.0};
  const RadialMatrix x2 = radial_operator_matrix(RadialOperatorKind::XSquared, spec);
  const RadialMatrix p2 = radial_operator_matrix(RadialOperatorKind::PSquared, spec);
  const RadialMatrix xi2 = radial_operator_matrix(RadialOperatorKind::XInvSquared, spec);
  v.check("<0|X^2|0> = 3/2 (ladder)", std::abs(x2.values(0, 0) - 1.5) < 1e-12, fmt("%.17g", x2.values(0, 0)));
  v.check("<0|P^2|0> = 3/2 (ladder)", std::abs(p2.values(0, 0) - 1.5) < 1e-12, fmt("%.17g", p2.values(0, 0)));
  v.check("<0|X^-2|0> = 2 (quadrature)", std::abs(xi2.values(0, 0) - 2.0) < 1e-10, fmt("%.17g", xi2.values(0, 0)));
  const double d = (x2.values - radial_x_squared_by_quadrature(spec)).cwiseAbs().maxCoeff();
  v.check("X^2 ladder vs quadrature over all 64x64 entries < 1e-10", d < 1e-10, fmt("max |diff| = %.3e", d));
  return v.finish();
}

int criterion4(const Desk& d) {
  Verdict v("criterion 4: charge structure of the 20 lowest states at (32,40)");
  v.check("model is (32,40)", d.config.model.radial.h0 == 32 && d.config.model.angular.l0 == 40);
  std::vector<SpectralRecord> recs = d.records;
  std::sort(recs.begin(), recs.end(), [](const auto& a, const auto& b) { return a.E < b.E; });
  if (recs.size() < 21) {
    v.check("at least 21 states available", false);
    return v.finish();
  }
  const double tol = d.config.solver.tol;
  const nlohmann::json& solver = d.summary["solver"];
  int converged = 0;
  for (int i = 0; i < 20; ++i) converged += solver["converged"][i].get<bool>();
  v.check("20 lowest states converged", converged == 20, std::to_string(converged) + "/20");

  double worst_q = 0.0;
  bool even = true;
  for (int i = 0; i < 20; ++i) {
    worst_q = std::max(worst_q, recs[i].q_quality);
    even &= recs[i].q_abs % 2 == 0;
  }
  v.check("sqrt<Q^2> within 0.05 of an even integer", worst_q < 0.05 && even, fmt("max deviation %.3e", worst_q));

  std::map<std::pair<int, int>, std::vector<double>> members;
  for (const SpectralRecord& r : recs) members[{r.q_abs, r.n}].push_back(r.E);
  int pairs = 0, bad = 0;
  double worst_split = 0.0;
  std::map<std::pair<int, int>, bool> seen;
  for (int i = 0; i < 20; ++i) {
    const SpectralRecord& r = recs[i];
    if (r.q_abs == 0 || seen[{r.q_abs, r.n}]) continue;
    seen[{r.q_abs, r.n}] = true;
    const std::vector<double>& m = members[{r.q_abs, r.n}];
    ++pairs;
    const double split = m.size() == 2 ? std::abs(m[0] - m[1]) : INFINITY;
    worst_split = std::max(worst_split, split);
    if (!(split <= 10.0 * tol)) {
      ++bad;
      std::printf("  pair q=%d n=%d: %zu member(s), split %.3e\n", r.q_abs, r.n, m.size(), split);
    }
  }
  v.check("q != 0 levels form degenerate pairs within 10 tol",
          bad == 0, std::to_string(pairs - bad) + "/" + std::to_string(pairs) + " pairs, worst split " +
                        fmt("%.3e", worst_split) + " vs " + fmt("%.1e", 10.0 * tol));

  const Eigen::MatrixXd vecs = read_eigenvectors((d.dir / "eigenvectors.json").string());
  const TensorOperator h = assemble_4h(d.config.model), q = assemble_charge(d.config.model);
  double worst_c = 0.0;
  for (int i = 0; i < 20 && i < vecs.cols(); ++i) {
    const Eigen::VectorXd x = vecs.col(i);
    const Eigen::VectorXd hx = apply(h, x), qx = apply(q, x);
    const double r = (apply(q, hx) - apply(h, qx)).norm() / hx.norm();
    worst_c = std::max(worst_c, r);
  }
  v.check("commutator residual ||[Q,H]v|| / ||4Hv|| < 1e-3", worst_c < 1e-3, fmt("max %.3e", worst_c));
  return v.finish();
}

int criterion5(const Desk& d) {
  Verdict v("criterion 5: six-oscillator construction against the reduced model");
  const auto t0 = std::chrono::steady_clock::now();
  const CrossCheckReport r = cross_check({4, 6, 8}, d.records, 5, 0.05);
  for (const CutoffSummary& s : r.sweep)
    std::printf("  Nmax=%d dim=%lld singlets=%lld E0=%.8f ground diff=%.3e\n", s.Nmax, (long long)s.dim,
                (long long)s.singlets, s.E0_direct, s.ground_diff);
  double worst = 0.0;
  for (const CrossCheckLevel& l : r.levels) {
    std::printf("  level %d: reduced %.6f (q=%d) direct %.6f (q=%d) rel diff %.4f\n", l.level, l.E_reduced,
                l.q_reduced, l.E_direct, l.q_direct, l.diff);
    worst = std::max(worst, l.diff);
  }
  v.check("lowest 5 singlet levels within 5% at Nmax = 8", r.within_tolerance && r.levels.size() == 5,
          fmt("worst %.4f", worst));
  v.check("charge labels match level by level", r.labels_match);
  v.check("ground-state difference nonincreasing over Nmax 4, 6, 8", r.ground_diff_nonincreasing);
  v.check("both ground energies <= 1.125", r.variational_bound && r.E0_reduced <= 1.125,
          fmt("reduced %.6f, direct %.6f", r.E0_reduced, r.sweep.back().E0_direct));
  std::printf("  %.1f s\n", seconds_since(t0));
  return v.finish();
}

int criterion6(const Desk& d) {
  Verdict v("criterion 6: Regge fitting");
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> ua(1.3, 2.5), ue(0.5, 2.5), uaa(1.0, 4.0), ub(0.5, 2.0), uc(0.5, 2.0);
  int recovered = 0;
  double worst = 0.0;
  for (int draw = 0; draw < 20; ++draw) {
    const ReggeParams p{ua(rng), ue(rng), uaa(rng), ub(rng), uc(rng)};
    const ReggeFit f = regge_fit(synthetic_regge(p, {0, 2, 4, 6, 8}, 6), ReggeMode::AlphaFree);
    const double rel = std::max({std::abs(f.params.alpha / p.alpha - 1), std::abs(f.params.E0 / p.E0 - 1),
                                 std::abs(f.params.a / p.a - 1), std::abs(f.params.b / p.b - 1),
                                 std::abs(f.params.c / p.c - 1)});
    worst = std::max(worst, rel);
    recovered += rel < 1e-6;
  }
  v.check("20 noiseless synthetic draws recovered to 1e-6", recovered == 20,
          std::to_string(recovered) + "/20, worst relative error " + fmt("%.2e", worst));

  const ReggeFit all = desk_fit(d, ReggeMode::AlphaFree, d.config.fit.region);
  std::printf("  alpha-free, configured region: alpha=%.4f E0=%.4f rms=%.2e points=%d (%s)\n", all.params.alpha,
              all.params.E0, all.rms_residual, all.points, all.status.c_str());
  const FitRegion region = trajectory_region(d);
  const ReggeFit free = desk_fit(d, ReggeMode::AlphaFree, region);
  std::printf("  alpha-free, trajectory region: alpha=%.4f E0=%.4f a=%.4f b=%.4f c=%.4f rms=%.2e points=%d\n",
              free.params.alpha, free.params.E0, free.params.a, free.params.b, free.params.c, free.rms_residual,
              free.points);
  v.check("alpha-free fit on the desk spectrum: alpha in [1.4, 2.4]",
          free.params.alpha >= 1.4 && free.params.alpha <= 2.4, fmt("alpha = %.4f", free.params.alpha));

  const ReggeFit fixed = desk_fit(d, ReggeMode::AlphaFixed2, region);
  std::printf("  alpha = 2: E0=%.4f a=%.4f b=%.4f c=%.4f rms=%.2e\n", fixed.params.E0, fixed.params.a,
              fixed.params.b, fixed.params.c, fixed.rms_residual);
  v.check("Chew-Frautschi slope b > 0", fixed.params.b > 0.0, fmt("b = %.4f", fixed.params.b));
  const auto lines = chew_frautschi(select_region(d.records, region), fixed.params.E0);
  int usable = 0, affine = 0;
  for (const ChewFrautschiLine& l : lines) {
    if (!std::isfinite(l.r2)) continue;
    ++usable;
    affine += l.r2 > 0.95 && l.slope > 0.0;
    std::printf("  n=%d: %d points, slope %.4f, R^2 %.5f\n", l.n, l.points, l.slope, l.r2);
  }
  v.check("per-n lines affine (R^2 > 0.95, positive slope) on the upper half of |q|", usable > 0 && affine == usable,
          std::to_string(affine) + "/" + std::to_string(usable) + " lines");
  return v.finish();
}

int criterion7() {
  Verdict v("criterion 7: Haar statistics of the micro-canonical effective dimension");
  const auto t0 = std::chrono::steady_clock::now();
  for (int d : {2, 4, 8, 16}) {
    const HaarStats s = haar_microcanonical_stats(d, 100000, derive_seed(7, d));
    const double target = 2.0 / (d + 1);
    const double z = std::abs(s.mean_purity - target) / s.se_purity;
    std::printf("  d=%d: mean sum|c|^4 = %.6f (target %.6f, z = %.2f), mean d_eff = %.5f\n", d, s.mean_purity, target,
                z, s.mean_deff);
    v.check("d=" + std::to_string(d) + " purity within 5 se of 2/(d+1)", z < 5.0);
    v.check("d=" + std::to_string(d) + " mean d_eff >= (1+d)/2", s.mean_deff >= (1.0 + d) / 2.0);
    if (d == 2) {
      const double zd = std::abs(s.mean_deff - M_PI / 2) / s.se_deff;
      v.check("d=2 mean d_eff within 3 se of pi/2", zd < 3.0, fmt("z = %.2f", zd));
    }
  }
  const double elapsed = seconds_since(t0);
  v.check("runtime in seconds", elapsed < 60.0, fmt("%.2f s", elapsed));
  return v.finish();
}

int criterion8(const Desk& d) {
  Verdict v("criterion 8: slow-observable trajectories on windows of the computed spectrum");
  const int q = d.config.equilibration.q;
  const std::vector<SpectralRecord> levels = sector_levels(d.records, q);
  std::printf("  sector q=%d has %zu levels\n", q, levels.size());
  for (int dd = 2; dd <= 8; ++dd) {
    if (static_cast<int>(levels.size()) < dd) {
      v.check("d=" + std::to_string(dd) + " window available in the sector", false);
      continue;
    }
    const MicrocanonicalWindow w = window_by_index(d.records, q, 0, dd);
    double gmin = INFINITY;
    for (int i = 0; i + 1 < dd; ++i) gmin = std::min(gmin, w.energies[i + 1] - w.energies[i]);
    const EquilibrationReport r = slow_observable_trajectory(w, time_grid(4.0 * M_PI / gmin, 2000));
    const double t0 = r.bound.front();
    v.check("d=" + std::to_string(dd) + " exact deviation >= certified bound on the grid",
            r.checks.at("certified_bound_holds"), fmt("min margin %.3e", r.extra["min_margin"].get<double>()));
    v.check("d=" + std::to_string(dd) + " certified bound at t=0 is (d-1)/d",
            std::abs(t0 - (dd - 1.0) / dd) < 1e-12, fmt("%.17g", t0));
  }

  // Ratio test on the sector with the longest trajectory: two disjoint d=3
  // windows starting at n=1 and ending at the trajectory's last level.
  const FitRegion region = trajectory_region(d);
  const ReggeFit fit = desk_fit(d, ReggeMode::AlphaFree, region);
  int best_q = q, best_len = 0;
  for (int s = 0; s <= 40; s += 2) {
    const int len = std::min<int>(sector_levels(d.records, s).size(), region.cutoff(s));
    if (len > best_len) best_q = s, best_len = len;
  }
  const int dw = 3, top = best_len - dw;
  std::printf("  ratio test in sector q=%d with %d trajectory levels\n", best_q, best_len);
  if (top < 1 + dw) {
    v.check("two disjoint windows available", false);
    return v.finish();
  }
  const MicrocanonicalWindow lo = window_by_index(d.records, best_q, 1, dw), hi = window_by_index(d.records, best_q, top, dw);
  const double k_lo = quadratic_shrinkage(lo), k_hi = quadratic_shrinkage(hi);
  const double measured = k_hi / k_lo;
  const double predicted = predicted_shrinkage(fit, hi.energies.front(), dw) / predicted_shrinkage(fit, lo.energies.front(), dw);
  const double pure = std::pow((hi.energies.front() + fit.params.E0) / (lo.energies.front() + fit.params.E0),
                               -2.0 * (fit.params.alpha - 1.0));
  std::printf("  windows at E = %.5f and %.5f: shrinkage %.5e and %.5e\n", lo.energies.front(), hi.energies.front(),
              k_lo, k_hi);
  std::printf("  ratio measured %.5f, (E+E0)^(-2(alpha-1)) ratio %.5f (gap-law ratio %.5f)\n", measured, pure,
              predicted);
  v.check("shrinkage ratio follows (E+E0)^(-2(alpha-1)) within 25%", std::abs(measured / pure - 1.0) < 0.25,
          fmt("relative deviation %.3f", std::abs(measured / pure - 1.0)));
  return v.finish();
}

Eigen::VectorXcd random_state(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(d);
  for (int i = 0; i < d; ++i) v[i] = {g(rng), g(rng)};
  return v / v.norm();
}

int criterion9() {
  Verdict v("criterion 9: subsystem equilibration");
  const ModelSpec spec = make_model_spec(4, 4);
  const EigenResult full = dense_full_spectrum(assemble_4h(spec));
  Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(full.size());
  for (int i = 24; i < 40; ++i) psi0 += full.eigenvectors.col(i).cast<std::complex<double>>();
  psi0 /= psi0.norm();
  const EquilibrationReport r = subsystem_equilibration_check(
      full, {{4, 4, 4}, 2}, psi0, default_horizon(full.eigenvalues.segment(24, 16)), 4000, 0.1);
  v.check("(4,4,4), S = angular register: mean trace distance <= d_S/sqrt(d_eff) * 1.1", r.checks.at("bound_holds"),
          fmt("mean %.4f, bound %.4f, d_eff %.3f", r.mean_deviation, r.bound_value, r.d_eff));
  v.check("(4,4,4) reduced states trace-preserving and Hermitian",
          r.checks.at("trace_preserved") && r.checks.at("hermitian"));

  std::mt19937_64 rng(90210);
  std::normal_distribution<double> g;
  int held = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd h(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j <= i; ++j) h(i, j) = h(j, i) = g(rng);
    const EigenResult e = dense_full_spectrum(h);
    const EquilibrationReport t =
        subsystem_equilibration_check(e, {{2, 2}, trial % 2}, random_state(4, rng), default_horizon(e.eigenvalues), 2000);
    held += t.checks.at("bound_holds");
  }
  v.check("random two-spin instances", held == 100, std::to_string(held) + "/100");
  return v.finish();
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = read_file(e.path().string());
  return files;
}

int criterion10(const std::string& cli, const std::string& config, const std::string& work) {
  Verdict v("criterion 10: repeated CLI runs give byte-identical outputs");
  const fs::path root(work);
  fs::remove_all(root);
  fs::create_directories(root);
  const std::vector<std::string> commands = {"build", "spectrum", "fit", "equilibrate", "oracle"};
  for (const char* tag : {"a", "b"}) {
    for (const std::string& cmd : commands) {
      const std::string line = "SOURCE_DATE_EPOCH=1700000000 '" + cli + "' " + cmd + " --config '" + config +
                               "' --out '" + (root / tag).string() + "' --threads 1 > '" +
                               (root / (std::string(tag) + "_" + cmd + ".log")).string() + "' 2>&1";
      const int status = std::system(line.c_str());
      const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
      if (std::string(tag) == "a") v.check(cmd + " exits 0 or 3", code == 0 || code == 3, "exit " + std::to_string(code));
    }
  }
  const auto a = snapshot(root / "a"), b = snapshot(root / "b");
  v.check("same file set", a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](const auto& x, const auto& y) {
            return x.first == y.first;
          }), std::to_string(a.size()) + " files");
  int differing = 0;
  for (const auto& [name, bytes] : a) {
    const auto it = b.find(name);
    if (it == b.end() || it->second != bytes) {
      ++differing;
      std::printf("  differs: %s\n", name.c_str());
    }
  }
  v.check("all CSV/JSON/SVG/binary outputs and manifests identical", differing == 0 && !a.empty());
  return v.finish();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <1..10> [desk dir | cli config work]\n";
    return 2;
  }
  const int c = std::atoi(argv[1]);
  try {
    switch (c) {
      case 1: return criterion1();
      case 3: return criterion3();
      case 7: return criterion7();
      case 9: return criterion9();
      case 2: case 4: case 5: case 6: case 8: {
        if (argc < 3) throw std::invalid_argument("criterion needs the desk spectrum directory");
        const Desk d = load_desk(argv[2]);
        if (c == 2) return criterion2(d);
        if (c == 4) return criterion4(d);
        if (c == 5) return criterion5(d);
        if (c == 6) return criterion6(d);
        return criterion8(d);
      }
      case 10:
        if (argc < 5) throw std::invalid_argument("criterion 10 needs <cli> <config> <work dir>");
        return criterion10(argv[2], argv[3], argv[4]);
      default: throw std::invalid_argument("unknown criterion");
    }
  } catch (const std::exception& e) {
    std::printf("[FAIL] criterion %d: %s\n", c, e.what());
    return 1;
  }
}
