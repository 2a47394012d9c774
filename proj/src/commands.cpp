#include "ymm/commands.hpp"

#include "ymm/equilibration.hpp"
#include "ymm/io.hpp"
#include "ymm/oracle6d.hpp"
#include "ymm/random.hpp"
#include "ymm/regge.hpp"
#include "ymm/svg.hpp"

#include <cmath>
#include <filesystem>
#include <map>
#include <set>

namespace ymm {

namespace {

namespace fs = std::filesystem;

nlohmann::json seeds_of(const RunConfig& c) {
  return {{"seed", c.seed}, {"solver", c.seed}, {"haar", derive_seed(c.seed, 1)}};
}

/// Runs `body` between manifest begin and finish; errors are recorded, then rethrown.
template <class Body>
CommandResult run(const std::string& name, const RunConfig& c, const std::string& out, Body body) {
  fs::create_directories(out);
  RunManifest m(name, out, to_json(c), seeds_of(c));
  CommandResult r;
  r.manifest = m.path();
  m.begin();
  try {
    body(m, r);
  } catch (const std::exception& e) {
    m.finish("error", e.what());
    throw;
  }
  m.finish(r.exit_code == kOk ? "ok" : "partial");
  return r;
}

void emit(RunManifest& m, CommandResult& r, const std::string& out, const std::string& name,
          const std::string& content) {
  write_file((fs::path(out) / name).string(), content);
  m.add_output(name);
  r.outputs.push_back(name);
}

std::string records_path(const std::string& configured, const std::string& out) {
  const std::string p = configured.empty() ? (fs::path(out) / "spectrum.csv").string() : configured;
  if (!fs::exists(p)) throw std::runtime_error("spectrum file '" + p + "' not found (run `spectrum` first)");
  return p;
}

std::vector<SpectralRecord> load_records(RunManifest& m, const std::string& path, const RunConfig& c) {
  m.add_input(path);
  const fs::path sibling = fs::path(path).parent_path() / "spectrum.manifest.json";
  if (fs::exists(sibling)) m.add_input(sibling.string());
  return parse_records_csv(read_file(path), c.spectrum.classify.reject_threshold);
}

ReggeFit fit_or_best(const std::vector<SpectralRecord>& recs, const RunConfig& c, ReggeMode mode, std::string& error) {
  try {
    return regge_fit(recs, c.fit.region, mode, c.fit.options);
  } catch (const FitError& e) {
    error = e.what();
    return e.best();
  }
}

}  // namespace

RunConfig apply_overrides(RunConfig c, std::optional<std::uint64_t> seed, std::optional<int> threads) {
  if (seed) c.seed = *seed;
  if (threads) c.threads = *threads;
  c.validate();
  return c;
}

CommandResult cmd_build(const RunConfig& c, const std::string& out) {
  return run("build", c, out, [&](RunManifest& m, CommandResult& r) {
    const nlohmann::json ops = {{"4H", to_json(assemble_4h(c.model))},
                                {"Q", to_json(assemble_charge(c.model))},
                                {"Q2", to_json(assemble_charge_squared(c.model))},
                                {"size", to_json(size_operator(c.model))}};
    emit(m, r, out, "operators.json",
         dump_json({{"model", to_json(c)["model"]}, {"dim", c.model.dim()}, {"operators", ops}}));
    r.summary = {{"dim", c.model.dim()}, {"terms_4H", ops["4H"]["terms"].size()}};
  });
}

CommandResult cmd_spectrum(const RunConfig& c, const std::string& out) {
  return run("spectrum", c, out, [&](RunManifest& m, CommandResult& r) {
    const EigenRequest req = c.request();
    if (!c.sweep.levels.empty()) {
      std::vector<ModelSpec> specs;
      for (const auto& [h0, l0] : c.sweep.levels) {
        ModelSpec s = c.model;
        s.radial.h0 = h0;
        s.angular.l0 = l0;
        specs.push_back(s);
      }
      EigenRequest sreq = req;
      sreq.k = c.sweep.k;
      const SweepResult sweep = truncation_sweep(specs, sreq, c.sweep.stability_tol);
      emit(m, r, out, "sweep.json", dump_json(to_json(sweep)));
      CsvWriter w({"h0", "l0", "level", "eigenvalue", "E", "residual"});
      for (const SweepLevel& l : sweep.levels)
        for (Eigen::Index i = 0; i < l.eigenvalues.size(); ++i)
          w.row({std::to_string(l.h0), std::to_string(l.l0), std::to_string(i), format_double(l.eigenvalues[i]),
                 format_double(l.eigenvalues[i] / 4.0), format_double(l.residuals[i])});
      emit(m, r, out, "sweep.csv", w.str());
      r.summary["sweep_ground_extrapolated"] = sweep.extrapolated.size() ? sweep.extrapolated[0] / 4.0 : NAN;
    }

    const EigenResult eig = lowest_eigenpairs(assemble_4h(c.model), req);
    const std::vector<SpectralRecord> recs =
        analyze_spectrum(eig, assemble_charge_squared(c.model), size_operator(c.model), c.spectrum.classify,
                         c.spectrum.degenerate_rel);
    emit(m, r, out, "spectrum.csv", records_csv(recs));
    int flagged = 0, pairs = 0;
    double e0 = INFINITY;
    for (const SpectralRecord& s : recs) {
      flagged += s.charge_flag;
      pairs += s.degenerate_pair;
      e0 = std::min(e0, s.E);
    }
    nlohmann::json summary = {{"model", to_json(c)["model"]},
                              {"solver", to_json(eig)},
                              {"count", recs.size()},
                              {"ground_state", e0},
                              {"all_converged", eig.all_converged()},
                              {"charge_flagged", flagged},
                              {"near_degenerate_flagged", pairs}};
    if (c.spectrum.store_eigenvectors) {
      write_eigenvectors((fs::path(out) / "eigenvectors.bin").string(),
                         (fs::path(out) / "eigenvectors.json").string(), eig.eigenvectors);
      m.add_output("eigenvectors.bin");
      m.add_output("eigenvectors.json");
      r.outputs.push_back("eigenvectors.bin");
      r.outputs.push_back("eigenvectors.json");
    }
    emit(m, r, out, "spectrum.json", dump_json(summary));
    r.summary["ground_state"] = e0;
    r.summary["all_converged"] = eig.all_converged();
    if (!eig.all_converged()) r.exit_code = kPartial;
  });
}

CommandResult cmd_fit(const RunConfig& c, const std::string& out) {
  return run("fit", c, out, [&](RunManifest& m, CommandResult& r) {
    const std::vector<SpectralRecord> recs = load_records(m, records_path(c.fit.spectrum, out), c);
    std::string err_free, err_fixed;
    const ReggeFit free = fit_or_best(recs, c, ReggeMode::AlphaFree, err_free);
    const ReggeFit fixed = fit_or_best(recs, c, ReggeMode::AlphaFixed2, err_fixed);
    const std::vector<ReggePoint> pts = select_region(recs, c.fit.region);
    const std::vector<ChewFrautschiLine> lines = chew_frautschi(pts, fixed.params.E0);

    nlohmann::json j = {{"alpha_free", to_json(free)},
                        {"alpha_fixed_2", to_json(fixed)},
                        {"chew_frautschi", to_json(lines)}};
    if (!err_free.empty()) j["alpha_free"]["error"] = err_free;
    if (!err_fixed.empty()) j["alpha_fixed_2"]["error"] = err_fixed;
    emit(m, r, out, "fit.json", dump_json(j));

    std::map<int, std::vector<const ReggePoint*>> by_q, by_n;
    for (const ReggePoint& p : pts) {
      by_q[p.q].push_back(&p);
      by_n[p.n].push_back(&p);
    }
    const ReggeParams& f = free.params;
    SvgPlot regge("Regge trajectories, alpha = " + format_double(f.alpha).substr(0, 6), "n",
                  "(E + E0)^alpha");
    for (const auto& [q, list] : by_q) {
      SvgSeries data{"q = " + std::to_string(q) + " data", {}, {}, false, true, {}};
      SvgSeries model{"q = " + std::to_string(q) + " fit", {}, {}, true, false, {}};
      for (const ReggePoint* p : list) {
        data.x.push_back(p->n);
        data.y.push_back(std::pow(p->E + f.E0, f.alpha));
        model.x.push_back(p->n);
        model.y.push_back(f.a + f.b * q + f.c * p->n);
      }
      regge.add(data).add(model);
    }
    emit(m, r, out, "regge.svg", regge.render());

    SvgPlot cf("Chew-Frautschi", "|q|", "(E + E0)^2");
    for (const auto& [n, list] : by_n) {
      SvgSeries s{"n = " + std::to_string(n), {}, {}, true, true, {}};
      for (const ReggePoint* p : list) {
        s.x.push_back(p->q);
        s.y.push_back(std::pow(p->E + fixed.params.E0, 2.0));
      }
      cf.add(s);
    }
    emit(m, r, out, "chew_frautschi.svg", cf.render());

    std::map<int, SvgSeries> sizes;
    std::vector<SpectralRecord> sorted = recs;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const SpectralRecord& a, const SpectralRecord& b) { return a.E < b.E; });
    for (const SpectralRecord& s : sorted) {
      SvgSeries& ser = sizes[s.q_abs];
      ser.label = "q = " + std::to_string(s.q_abs);
      ser.line = true;
      ser.markers = true;
      ser.x.push_back(s.E);
      ser.y.push_back(s.size);
      ser.flagged.push_back(s.degenerate_pair);
    }
    SvgPlot sz("State size", "E", "size");
    for (auto& [q, s] : sizes) sz.add(s);
    emit(m, r, out, "sizes.svg", sz.render());

    r.summary = {{"alpha", f.alpha}, {"E0", f.E0}, {"points", pts.size()}};
    if (!err_free.empty() || !err_fixed.empty()) r.exit_code = kPartial;
  });
}

CommandResult cmd_equilibrate(const RunConfig& c, const std::string& out) {
  return run("equilibrate", c, out, [&](RunManifest& m, CommandResult& r) {
    const EquilibrationConfig& e = c.equilibration;
    const std::vector<SpectralRecord> recs = load_records(m, records_path(e.spectrum, out), c);
    std::string fit_error;
    const ReggeFit fit = fit_or_best(recs, c, ReggeMode::AlphaFree, fit_error);

    nlohmann::json windows = nlohmann::json::array(), haar = nlohmann::json::array();
    bool all_passed = true;
    for (int d : e.sizes) {
      const MicrocanonicalWindow w = window_by_index(recs, e.q, e.n_start, d);
      const Eigen::VectorXd energies = Eigen::Map<const Eigen::VectorXd>(w.energies.data(), d);
      double min_gap = INFINITY;
      for (int i = 0; i + 1 < d; ++i) min_gap = std::min(min_gap, w.energies[i + 1] - w.energies[i]);
      if (!(min_gap > 0.0)) throw std::runtime_error("equilibration: window has coincident levels");
      const double traj_T = e.trajectory_periods * 2.0 * M_PI / min_gap;
      EquilibrationReport traj = slow_observable_trajectory(w, time_grid(traj_T, e.trajectory_samples));
      traj.seed = c.seed;

      Eigen::MatrixXcd hop = Eigen::MatrixXcd::Zero(d, d);
      for (int i = 0; i + 1 < d; ++i) hop(i, i + 1) = hop(i + 1, i) = 1.0;
      const EquilibrationReport obs = observable_equilibration_check(
          AmplitudeVector::uniform(energies), hop, e.horizon_factor / min_gap, e.samples, e.slack);

      const HaarStats h = haar_microcanonical_stats(d, e.haar_samples, derive_seed(derive_seed(c.seed, 1), d),
                                                   c.threads);
      haar.push_back(to_json(h));
      nlohmann::json est = nlohmann::json(nullptr);
      if (fit.params.c > 0.0 && w.E + fit.params.E0 > 0.0) {
        const DeffEstimate de = microcanonical_deff_estimate(fit, w.E, w.Delta, e.q);
        est = {{"d_delta", de.d_delta}, {"deff_bound", de.deff_bound}};
      }
      nlohmann::json tj = to_json(traj);
      for (const char* k : {"times", "deviation", "bound", "quadratic_bound"}) tj.erase(k);
      windows.push_back({{"window", to_json(w)},
                         {"trajectory", tj},
                         {"observable", {{"mean_deviation", obs.mean_deviation},
                                         {"bound", obs.bound_value},
                                         {"horizon", obs.horizon},
                                         {"passed", obs.passed()}}},
                         {"quadratic_shrinkage", quadratic_shrinkage(w)},
                         {"predicted_shrinkage", predicted_shrinkage(fit, w.E, d)},
                         {"deff_estimate", est},
                         {"trajectory_csv", "trajectory_d" + std::to_string(d) + ".csv"}});
      all_passed = all_passed && traj.passed() && obs.passed() && h.deff_bound;

      const std::string stem = "trajectory_d" + std::to_string(d);
      emit(m, r, out, stem + ".csv", trajectory_csv(traj));
      SvgPlot p("Hopping observable, d = " + std::to_string(d), "t", "deviation");
      p.add({"exact", traj.times, traj.deviation, true, false, {}});
      p.add({"certified bound", traj.times, traj.bound, true, false, {}});
      p.add({"quadratic curve", traj.times, traj.quadratic_bound, true, false, {}});
      emit(m, r, out, stem + ".svg", p.render());
    }

    nlohmann::json gap = nlohmann::json(nullptr);
    try {
      gap = to_json(gap_bound_check(recs, fit, e.E_floor));
    } catch (const std::invalid_argument& ex) {
      gap = {{"error", ex.what()}};
    }

    nlohmann::json sub = nlohmann::json(nullptr);
    if (e.subsystem) {
      const ModelSpec spec = make_model_spec(e.subsystem_h0, e.subsystem_l0, c.model.radial.scale);
      const EigenResult full = dense_full_spectrum(assemble_4h(spec), c.solver.dense_threshold);
      Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(full.size());
      for (int i = e.subsystem_first; i < e.subsystem_first + e.subsystem_count; ++i)
        psi0 += full.eigenvectors.col(i).cast<std::complex<double>>();
      psi0 /= psi0.norm();
      const Eigen::VectorXd used = full.eigenvalues.segment(e.subsystem_first, e.subsystem_count);
      const double T = e.subsystem_count > 1 ? e.horizon_factor * default_horizon(used) / 1e4 : 1.0;
      EquilibrationReport rs = subsystem_equilibration_check(
          full, {{e.subsystem_h0, e.subsystem_h0, e.subsystem_l0}, 2}, psi0, T, e.samples, e.slack);
      nlohmann::json sj = to_json(rs);
      for (const char* k : {"times", "deviation", "bound"}) sj.erase(k);
      sub = sj;
      all_passed = all_passed && rs.passed();
    }

    nlohmann::json fit_json = to_json(fit);
    if (!fit_error.empty()) fit_json["error"] = fit_error;
    emit(m, r, out, "haar.json", dump_json(haar));
    emit(m, r, out, "equilibration.json",
         dump_json({{"fit", fit_json}, {"windows", windows}, {"gap_bound", gap}, {"subsystem", sub},
                    {"passed", all_passed}}));
    r.summary = {{"passed", all_passed}, {"windows", e.sizes.size()}};
  });
}

CommandResult cmd_oracle(const RunConfig& c, const std::string& out) {
  return run("oracle", c, out, [&](RunManifest& m, CommandResult& r) {
    std::vector<SpectralRecord> reduced;
    const std::string p = c.oracle.spectrum.empty() ? (fs::path(out) / "spectrum.csv").string() : c.oracle.spectrum;
    nlohmann::json source;
    if (fs::exists(p)) {
      reduced = load_records(m, p, c);
      source = {{"records", fs::path(p).filename().string()}};
    } else {
      const EigenResult eig = lowest_eigenpairs(assemble_4h(c.model), c.request());
      reduced = analyze_spectrum(eig, assemble_charge_squared(c.model), size_operator(c.model), c.spectrum.classify,
                                 c.spectrum.degenerate_rel);
      source = {{"solved", to_json(c)["model"]}};
    }
    CrossCheckReport rep = cross_check(c.oracle.cutoffs, reduced, c.oracle.k, c.oracle.rel_tol, c.threads);
    rep.reduced = source;
    nlohmann::json j = to_json(rep);
    nlohmann::json diag = nlohmann::json::array();
    std::set<int> cuts(c.oracle.cutoffs.begin(), c.oracle.cutoffs.end());
    for (int n : cuts) diag.push_back(to_json(oracle_diagnostics(FockCutoff{n})));
    j["diagnostics"] = diag;
    emit(m, r, out, "oracle.json", dump_json(j));
    emit(m, r, out, "oracle.csv", cross_check_csv(rep));
    r.summary = {{"passed", rep.passed()}};
  });
}

}  // namespace ymm
