#include "ymm/config.hpp"

#include <climits>
#include <cmath>
#include <fstream>
#include <set>

namespace ymm {

namespace {

using nlohmann::json;

class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(name() + ": expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(field(key) + ": wrong type (" + it->type_name() + ")");
    }
  }

  /// null maps to `none`.
  void get_optional_int(const char* key, int& out, int none) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    if (it->is_null()) {
      out = none;
      return;
    }
    get(key, out);
  }

  bool has(const char* key) const { return j_.contains(key); }

  Section sub(const char* key) {
    seen_.insert(key);
    static const json empty = json::object();
    const auto it = j_.find(key);
    return Section(it == j_.end() ? empty : *it, field(key));
  }

  const json& raw(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError(field(k.c_str()) + ": unknown field");
  }

  std::string field(const char* key) const { return path_.empty() ? std::string(key) : path_ + "." + key; }

 private:
  std::string name() const { return path_.empty() ? "config" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

json int_or_null(int v) { return v == INT_MAX ? json(nullptr) : json(v); }

}  // namespace

std::string to_string(SolverMode m) {
  switch (m) {
    case SolverMode::Dense: return "dense";
    case SolverMode::Lanczos: return "lanczos";
    case SolverMode::Auto: return "auto";
  }
  return "auto";
}

SolverMode solver_mode_from_string(const std::string& s) {
  if (s == "dense") return SolverMode::Dense;
  if (s == "lanczos") return SolverMode::Lanczos;
  if (s == "auto") return SolverMode::Auto;
  throw ConfigError("solver.mode: expected dense, lanczos or auto, got '" + s + "'");
}

std::string to_string(ChargeConvention c) { return c == ChargeConvention::Consistent ? "consistent" : "unshifted"; }

ChargeConvention charge_convention_from_string(const std::string& s) {
  if (s == "consistent") return ChargeConvention::Consistent;
  if (s == "unshifted") return ChargeConvention::Unshifted;
  throw ConfigError("model.charge_convention: expected consistent or unshifted, got '" + s + "'");
}

void RunConfig::validate() const {
  require(model.radial.h0 >= 1, "model.h0: must be >= 1");
  require(model.angular.l0 >= 3, "model.l0: must be >= 3");
  require(model.radial.quad_order == 0 || model.radial.quad_order >= 2 * model.radial.h0 + 8,
          "model.quad_order: must be 0 or >= 2*h0+8");
  require(model.radial.scale > 0.0 && std::isfinite(model.radial.scale), "model.scale: must be positive and finite");
  require(model.dim() <= model.max_dimension, "model.max_dimension: h0*h0*l0 exceeds the budget");
  require(solver.k >= 1, "solver.k: must be >= 1");
  require(solver.tol > 0.0, "solver.tol: must be > 0");
  require(solver.max_iter >= 1, "solver.max_iter: must be >= 1");
  require(solver.dense_threshold >= 1, "solver.dense_threshold: must be >= 1");
  require(solver.max_basis == 0 || solver.max_basis > solver.k, "solver.max_basis: must be 0 or exceed k");
  require(threads >= 1, "threads: must be >= 1");
  for (const auto& [h0, l0] : sweep.levels) require(h0 >= 1 && l0 >= 3, "sweep.levels: need h0 >= 1 and l0 >= 3");
  for (std::size_t i = 1; i < sweep.levels.size(); ++i)
    require(sweep.levels[i].first >= sweep.levels[i - 1].first && sweep.levels[i].second >= sweep.levels[i - 1].second,
            "sweep.levels: h0 and l0 must be nondecreasing");
  require(sweep.k >= 1, "sweep.k: must be >= 1");
  require(sweep.stability_tol > 0.0, "sweep.stability_tol: must be > 0");
  require(spectrum.classify.reject_threshold > 0.0, "spectrum.reject_threshold: must be > 0");
  require(spectrum.degenerate_rel >= 0.0, "spectrum.degenerate_rel: must be >= 0");
  require(fit.region.q_min >= 0 && fit.region.q_max >= fit.region.q_min, "fit.q_max: must be >= q_min >= 0");
  require(fit.options.max_iter >= 1, "fit.max_iter: must be >= 1");
  require(fit.options.tol > 0.0, "fit.tol: must be > 0");
  const EquilibrationConfig& e = equilibration;
  require(e.q >= 0 && e.q % 2 == 0, "equilibration.q: must be an even integer >= 0");
  require(e.n_start >= 0, "equilibration.n_start: must be >= 0");
  require(!e.sizes.empty(), "equilibration.sizes: must not be empty");
  for (int d : e.sizes) require(d >= 2, "equilibration.sizes: every d_Delta must be >= 2");
  require(e.samples >= 2, "equilibration.samples: must be >= 2");
  require(e.horizon_factor > 0.0, "equilibration.horizon_factor: must be > 0");
  require(e.trajectory_samples >= 2, "equilibration.trajectory_samples: must be >= 2");
  require(e.trajectory_periods > 0.0, "equilibration.trajectory_periods: must be > 0");
  require(e.haar_samples >= 100, "equilibration.haar_samples: must be >= 100");
  require(e.slack >= 0.0, "equilibration.slack: must be >= 0");
  require(e.subsystem_h0 >= 1 && e.subsystem_l0 >= 3, "equilibration.subsystem_l0: need h0 >= 1 and l0 >= 3");
  const int sub_dim = e.subsystem_h0 * e.subsystem_h0 * e.subsystem_l0;
  require(e.subsystem_first >= 0 && e.subsystem_count >= 1 && e.subsystem_first + e.subsystem_count <= sub_dim,
          "equilibration.subsystem_count: initial levels exceed the dense instance");
  require(!oracle.cutoffs.empty(), "oracle.cutoffs: must not be empty");
  for (int n : oracle.cutoffs) require(n >= 2 && n <= 20, "oracle.cutoffs: each Nmax must lie in [2, 20]");
  require(oracle.k >= 1, "oracle.k: must be >= 1");
  require(oracle.rel_tol > 0.0, "oracle.rel_tol: must be > 0");
}

EigenRequest RunConfig::request() const {
  EigenRequest r = solver;
  r.seed = seed;
  r.threads = threads;
  return r;
}

RunConfig parse_config(const nlohmann::json& j) {
  RunConfig c;
  Section root(j, "");
  root.get("seed", c.seed);
  root.get("threads", c.threads);

  Section m = root.sub("model");
  m.get("h0", c.model.radial.h0);
  m.get("l0", c.model.angular.l0);
  m.get("scale", c.model.radial.scale);
  m.get("quad_order", c.model.radial.quad_order);
  m.get("max_dimension", c.model.max_dimension);
  std::string conv = to_string(c.model.charge_convention);
  m.get("charge_convention", conv);
  c.model.charge_convention = charge_convention_from_string(conv);
  m.finish();

  Section s = root.sub("solver");
  s.get("k", c.solver.k);
  s.get("tol", c.solver.tol);
  s.get("max_iter", c.solver.max_iter);
  s.get("dense_threshold", c.solver.dense_threshold);
  s.get("max_basis", c.solver.max_basis);
  s.get("split_parity", c.solver.split_parity);
  std::string mode = to_string(c.solver.mode);
  s.get("mode", mode);
  c.solver.mode = solver_mode_from_string(mode);
  s.finish();

  Section w = root.sub("sweep");
  std::vector<std::vector<int>> levels;
  if (w.has("levels")) {
    w.get("levels", levels);
    c.sweep.levels.clear();
    for (const auto& l : levels) {
      if (l.size() != 2) throw ConfigError("sweep.levels: each entry must be [h0, l0]");
      c.sweep.levels.emplace_back(l[0], l[1]);
    }
  }
  w.get("k", c.sweep.k);
  w.get("stability_tol", c.sweep.stability_tol);
  w.finish();

  Section sp = root.sub("spectrum");
  sp.get("cluster_tol", c.spectrum.classify.cluster_tol);
  sp.get("reject_threshold", c.spectrum.classify.reject_threshold);
  sp.get("degenerate_rel", c.spectrum.degenerate_rel);
  sp.get("store_eigenvectors", c.spectrum.store_eigenvectors);
  sp.finish();

  Section f = root.sub("fit");
  f.get("q_min", c.fit.region.q_min);
  f.get_optional_int("q_max", c.fit.region.q_max, INT_MAX);
  f.get_optional_int("n_cutoff", c.fit.region.default_n_cutoff, INT_MAX);
  if (f.has("n_cutoff_per_q")) {
    const json& per = f.raw("n_cutoff_per_q");
    if (!per.is_object()) throw ConfigError("fit.n_cutoff_per_q: expected an object keyed by q");
    for (const auto& [q, n] : per.items()) {
      try {
        if (!n.is_number_integer()) throw std::invalid_argument("value");
        c.fit.region.n_cutoff[std::stoi(q)] = n.get<int>();
      } catch (const std::exception&) {
        throw ConfigError("fit.n_cutoff_per_q." + q + ": expected integer key and value");
      }
    }
  }
  f.get("exclude_flagged", c.fit.region.exclude_flagged);
  f.get("max_iter", c.fit.options.max_iter);
  f.get("tol", c.fit.options.tol);
  f.get("spectrum", c.fit.spectrum);
  f.finish();

  Section e = root.sub("equilibration");
  EquilibrationConfig& q = c.equilibration;
  e.get("q", q.q);
  e.get("n_start", q.n_start);
  e.get("sizes", q.sizes);
  e.get("samples", q.samples);
  e.get("horizon_factor", q.horizon_factor);
  e.get("trajectory_samples", q.trajectory_samples);
  e.get("trajectory_periods", q.trajectory_periods);
  e.get("haar_samples", q.haar_samples);
  e.get("slack", q.slack);
  e.get("E_floor", q.E_floor);
  e.get("subsystem", q.subsystem);
  e.get("subsystem_h0", q.subsystem_h0);
  e.get("subsystem_l0", q.subsystem_l0);
  e.get("subsystem_first", q.subsystem_first);
  e.get("subsystem_count", q.subsystem_count);
  e.get("spectrum", q.spectrum);
  e.finish();

  Section o = root.sub("oracle");
  o.get("cutoffs", c.oracle.cutoffs);
  o.get("k", c.oracle.k);
  o.get("rel_tol", c.oracle.rel_tol);
  o.get("spectrum", c.oracle.spectrum);
  o.finish();

  root.finish();
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: parse error in '" + path + "': " + e.what());
  }
  return parse_config(j);
}

nlohmann::json to_json(const RunConfig& c) {
  json levels = json::array();
  for (const auto& [h0, l0] : c.sweep.levels) levels.push_back({h0, l0});
  json per = json::object();
  for (const auto& [q, n] : c.fit.region.n_cutoff) per[std::to_string(q)] = n;
  const EquilibrationConfig& e = c.equilibration;
  return {
      {"seed", c.seed},
      {"threads", c.threads},
      {"model",
       {{"h0", c.model.radial.h0},
        {"l0", c.model.angular.l0},
        {"scale", c.model.radial.scale},
        {"quad_order", c.model.radial.quad_order},
        {"max_dimension", c.model.max_dimension},
        {"charge_convention", to_string(c.model.charge_convention)}}},
      {"solver",
       {{"k", c.solver.k},
        {"tol", c.solver.tol},
        {"max_iter", c.solver.max_iter},
        {"mode", to_string(c.solver.mode)},
        {"dense_threshold", c.solver.dense_threshold},
        {"max_basis", c.solver.max_basis},
        {"split_parity", c.solver.split_parity}}},
      {"sweep", {{"levels", levels}, {"k", c.sweep.k}, {"stability_tol", c.sweep.stability_tol}}},
      {"spectrum",
       {{"cluster_tol", c.spectrum.classify.cluster_tol},
        {"reject_threshold", c.spectrum.classify.reject_threshold},
        {"degenerate_rel", c.spectrum.degenerate_rel},
        {"store_eigenvectors", c.spectrum.store_eigenvectors}}},
      {"fit",
       {{"q_min", c.fit.region.q_min},
        {"q_max", int_or_null(c.fit.region.q_max)},
        {"n_cutoff", int_or_null(c.fit.region.default_n_cutoff)},
        {"n_cutoff_per_q", per},
        {"exclude_flagged", c.fit.region.exclude_flagged},
        {"max_iter", c.fit.options.max_iter},
        {"tol", c.fit.options.tol},
        {"spectrum", c.fit.spectrum}}},
      {"equilibration",
       {{"q", e.q},
        {"n_start", e.n_start},
        {"sizes", e.sizes},
        {"samples", e.samples},
        {"horizon_factor", e.horizon_factor},
        {"trajectory_samples", e.trajectory_samples},
        {"trajectory_periods", e.trajectory_periods},
        {"haar_samples", e.haar_samples},
        {"slack", e.slack},
        {"E_floor", e.E_floor},
        {"subsystem", e.subsystem},
        {"subsystem_h0", e.subsystem_h0},
        {"subsystem_l0", e.subsystem_l0},
        {"subsystem_first", e.subsystem_first},
        {"subsystem_count", e.subsystem_count},
        {"spectrum", e.spectrum}}},
      {"oracle",
       {{"cutoffs", c.oracle.cutoffs}, {"k", c.oracle.k}, {"rel_tol", c.oracle.rel_tol},
        {"spectrum", c.oracle.spectrum}}},
  };
}

}  // namespace ymm
