#include "ymm/regge.hpp"

#include <unsupported/Eigen/LevenbergMarquardt>

#include <algorithm>
#include <cmath>
#include <limits>

namespace ymm {

std::string to_string(ReggeMode m) { return m == ReggeMode::AlphaFree ? "alpha_free" : "alpha_fixed_2"; }

ReggeMode regge_mode_from_string(const std::string& s) {
  if (s == "alpha_free") return ReggeMode::AlphaFree;
  if (s == "alpha_fixed_2") return ReggeMode::AlphaFixed2;
  throw std::invalid_argument("fit.mode: expected alpha_free or alpha_fixed_2, got '" + s + "'");
}

int FitRegion::cutoff(int q) const {
  const auto it = n_cutoff.find(q);
  return it == n_cutoff.end() ? default_n_cutoff : it->second;
}

std::vector<ReggePoint> select_region(const std::vector<SpectralRecord>& records, const FitRegion& region) {
  std::map<std::pair<int, int>, std::pair<double, int>> acc;
  for (const SpectralRecord& r : records) {
    if (r.n < 0) throw std::invalid_argument("select_region: records not enumerated");
    if (r.q_abs < region.q_min || r.q_abs > region.q_max || r.n >= region.cutoff(r.q_abs)) continue;
    if (region.exclude_flagged && (r.degenerate_pair || r.charge_flag)) continue;
    auto& a = acc[{r.q_abs, r.n}];
    a.first += r.E;
    ++a.second;
  }
  std::vector<ReggePoint> out;
  for (const auto& [key, a] : acc) out.push_back({a.first / a.second, key.first, key.second});
  return out;
}

namespace {

struct Functor : Eigen::DenseFunctor<double> {
  const std::vector<ReggePoint>& pts;
  bool free_alpha;

  Functor(const std::vector<ReggePoint>& p, bool free)
      : DenseFunctor<double>(free ? 5 : 4, static_cast<int>(p.size())), pts(p), free_alpha(free) {}

  ReggeParams unpack(const Eigen::VectorXd& x) const {
    ReggeParams p;
    int i = 0;
    p.alpha = free_alpha ? x[i++] : 2.0;
    p.E0 = x[i++];
    p.a = x[i++];
    p.b = x[i++];
    p.c = x[i++];
    return p;
  }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    const ReggeParams p = unpack(x);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double u = p.a + p.b * pts[i].q + p.c * pts[i].n;
      // outside the domain: a residual large enough that the trust region rejects the step
      f[i] = u > 0.0 && p.alpha > 0.0 ? std::pow(u, 1.0 / p.alpha) - p.E0 - pts[i].E : 1e8;
    }
    return 0;
  }

  int df(const Eigen::VectorXd& x, Eigen::MatrixXd& j) const {
    const ReggeParams p = unpack(x);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double u = p.a + p.b * pts[i].q + p.c * pts[i].n;
      const double g = u > 0.0 ? std::pow(u, 1.0 / p.alpha) : 0.0;
      const double dg = u > 0.0 ? g / (p.alpha * u) : 0.0;
      int k = 0;
      if (free_alpha) j(i, k++) = u > 0.0 ? -g * std::log(u) / (p.alpha * p.alpha) : 0.0;
      j(i, k++) = -1.0;
      j(i, k++) = dg;
      j(i, k++) = dg * pts[i].q;
      j(i, k++) = dg * pts[i].n;
    }
    return 0;
  }
};

Eigen::VectorXd pack(const ReggeParams& p, bool free_alpha) {
  Eigen::VectorXd x(free_alpha ? 5 : 4);
  int i = 0;
  if (free_alpha) x[i++] = p.alpha;
  x[i++] = p.E0;
  x[i++] = p.a;
  x[i++] = p.b;
  x[i++] = p.c;
  return x;
}

void finalize(const Functor& fn, const Eigen::VectorXd& x, ReggeFit& fit) {
  fit.params = fn.unpack(x);
  Eigen::VectorXd f(fn.values());
  fn(x, f);
  fit.residuals = f;
  fit.rms_residual = std::sqrt(f.squaredNorm() / double(f.size()));
  Eigen::MatrixXd j(fn.values(), fn.inputs());
  fn.df(x, j);
  const Eigen::Index p = fn.inputs();
  const double dof = double(f.size() - p);
  const double s2 = dof > 0 ? f.squaredNorm() / dof : 0.0;
  const Eigen::MatrixXd cov = s2 * (j.transpose() * j).inverse();
  fit.covariance = Eigen::MatrixXd::Zero(5, 5);
  const Eigen::Index off = fn.free_alpha ? 0 : 1;
  fit.covariance.block(off, off, p, p) = 0.5 * (cov + cov.transpose());
}

}  // namespace

ReggeFit regge_fit(const std::vector<ReggePoint>& points, ReggeMode mode, const ReggeOptions& opt) {
  if (points.size() < 8) throw std::invalid_argument("regge_fit: need >= 8 points in the region");
  Eigen::MatrixXd design(points.size(), 3);
  Eigen::VectorXd rhs(points.size());
  ReggeParams init;
  for (std::size_t i = 0; i < points.size(); ++i) {
    design.row(i) << 1.0, double(points[i].q), double(points[i].n);
    rhs[i] = std::pow(std::max(points[i].E + init.E0, 0.0), init.alpha);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 3) throw std::invalid_argument("regge_fit: singular design (need distinct q and n values)");
  const Eigen::Vector3d abc = qr.solve(rhs);
  init.a = abc[0];
  init.b = abc[1];
  init.c = abc[2];
  // the linear solution can leave the lowest point outside u > 0; lift a just enough
  const Eigen::VectorXd u = design * abc;
  if (u.minCoeff() <= 0.0) init.a += 0.1 * u.maxCoeff() - u.minCoeff();

  const bool free_alpha = mode == ReggeMode::AlphaFree;
  Functor fn(points, free_alpha);
  Eigen::VectorXd x = pack(init, free_alpha);
  Eigen::LevenbergMarquardt<Functor> lm(fn);
  lm.setXtol(opt.tol);
  lm.setFtol(opt.tol);
  lm.setMaxfev(10 * opt.max_iter);

  ReggeFit fit;
  fit.mode = mode;
  fit.points = static_cast<int>(points.size());
  Eigen::VectorXd f(fn.values());
  auto objective = [&]() {
    fn(x, f);
    return f.squaredNorm();
  };
  fit.objective.push_back(objective());
  using Status = Eigen::LevenbergMarquardtSpace::Status;
  Status status = lm.minimizeInit(x);
  if (status == Status::ImproperInputParameters) throw std::invalid_argument("regge_fit: improper optimizer input");
  do {
    status = lm.minimizeOneStep(x);
    ++fit.iterations;
    const double obj = objective();
    if (obj != fit.objective.back()) fit.objective.push_back(obj);
  } while (status == Status::Running && fit.iterations < opt.max_iter);

  Eigen::MatrixXd j(fn.values(), fn.inputs());
  fn.df(x, j);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
  const Eigen::VectorXd sv = svd.singularValues();
  if (!(sv[sv.size() - 1] > 1e-12 * sv[0])) throw std::invalid_argument("regge_fit: singular Jacobian at the optimum");
  finalize(fn, x, fit);

  switch (status) {
    case Status::RelativeReductionTooSmall: fit.status = "relative_reduction"; break;
    case Status::RelativeErrorTooSmall: fit.status = "relative_error"; break;
    case Status::RelativeErrorAndReductionTooSmall: fit.status = "relative_error_and_reduction"; break;
    case Status::CosinusTooSmall: fit.status = "orthogonal_gradient"; break;
    case Status::FtolTooSmall: fit.status = "ftol_limit"; break;
    case Status::XtolTooSmall: fit.status = "xtol_limit"; break;
    case Status::GtolTooSmall: fit.status = "gtol_limit"; break;
    default: fit.status = "not_converged"; break;
  }
  if (fit.status == "not_converged") throw FitError("regge_fit: no convergence within max_iter", fit);
  double emin = std::numeric_limits<double>::infinity();
  for (const ReggePoint& p : points) emin = std::min(emin, p.E);
  if (!(fit.params.E0 > -emin)) throw FitError("regge_fit: E0 <= -min(E) at the optimum", fit);
  if (!(fit.params.alpha > 0.0)) throw FitError("regge_fit: alpha <= 0 at the optimum", fit);
  return fit;
}

ReggeFit regge_fit(const std::vector<SpectralRecord>& records, const FitRegion& region, ReggeMode mode,
                   const ReggeOptions& opt) {
  ReggeFit fit = regge_fit(select_region(records, region), mode, opt);
  fit.region = region;
  return fit;
}

std::vector<ReggePoint> synthetic_regge(const ReggeParams& p, const std::vector<int>& qs, int n_count) {
  std::vector<ReggePoint> out;
  for (int q : qs)
    for (int n = 0; n < n_count; ++n) {
      const double u = p.a + p.b * q + p.c * n;
      if (!(u > 0.0)) throw std::invalid_argument("synthetic_regge: a + b q + c n must be > 0");
      out.push_back({std::pow(u, 1.0 / p.alpha) - p.E0, q, n});
    }
  return out;
}

std::vector<ChewFrautschiLine> chew_frautschi(const std::vector<ReggePoint>& points, double E0) {
  std::map<int, std::vector<const ReggePoint*>> by_n;
  for (const ReggePoint& p : points) by_n[p.n].push_back(&p);
  std::vector<ChewFrautschiLine> out;
  for (auto& [n, pts] : by_n) {
    std::sort(pts.begin(), pts.end(), [](const ReggePoint* a, const ReggePoint* b) { return a->q < b->q; });
    const std::size_t first = pts.size() / 2;
    ChewFrautschiLine line;
    line.n = n;
    line.points = static_cast<int>(pts.size() - first);
    if (line.points < 2) {
      line.slope = line.intercept = line.r2 = std::numeric_limits<double>::quiet_NaN();
      out.push_back(line);
      continue;
    }
    Eigen::MatrixXd d(line.points, 2);
    Eigen::VectorXd y(line.points);
    for (int i = 0; i < line.points; ++i) {
      const ReggePoint& p = *pts[first + i];
      d.row(i) << 1.0, double(p.q);
      y[i] = (p.E + E0) * (p.E + E0);
    }
    const Eigen::Vector2d coef = d.colPivHouseholderQr().solve(y);
    line.intercept = coef[0];
    line.slope = coef[1];
    const double ss_res = (y - d * coef).squaredNorm();
    const double ss_tot = (y.array() - y.mean()).square().sum();
    line.r2 = line.points < 3 ? std::numeric_limits<double>::quiet_NaN()
                              : (ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0);
    out.push_back(line);
  }
  return out;
}

namespace {

nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json to_json(const ReggeFit& f) {
  nlohmann::json j;
  j["mode"] = to_string(f.mode);
  j["alpha"] = f.params.alpha;
  j["E0"] = f.params.E0;
  j["a"] = f.params.a;
  j["b"] = f.params.b;
  j["c"] = f.params.c;
  j["rms_residual"] = f.rms_residual;
  j["points"] = f.points;
  j["iterations"] = f.iterations;
  j["status"] = f.status;
  nlohmann::json cov = nlohmann::json::array();
  for (Eigen::Index r = 0; r < f.covariance.rows(); ++r) {
    std::vector<double> row(f.covariance.cols());
    for (Eigen::Index c = 0; c < f.covariance.cols(); ++c) row[c] = f.covariance(r, c);
    cov.push_back(row);
  }
  j["covariance"] = std::move(cov);
  j["covariance_order"] = {"alpha", "E0", "a", "b", "c"};
  nlohmann::json region;
  region["q_min"] = f.region.q_min;
  region["q_max"] = f.region.q_max == INT_MAX ? nlohmann::json(nullptr) : nlohmann::json(f.region.q_max);
  region["default_n_cutoff"] =
      f.region.default_n_cutoff == INT_MAX ? nlohmann::json(nullptr) : nlohmann::json(f.region.default_n_cutoff);
  nlohmann::json cuts = nlohmann::json::object();
  for (const auto& [q, n] : f.region.n_cutoff) cuts[std::to_string(q)] = n;
  region["n_cutoff"] = std::move(cuts);
  region["exclude_flagged"] = f.region.exclude_flagged;
  j["region"] = std::move(region);
  return j;
}

nlohmann::json to_json(const std::vector<ChewFrautschiLine>& lines) {
  nlohmann::json arr = nlohmann::json::array();
  for (const ChewFrautschiLine& l : lines)
    arr.push_back({{"n", l.n}, {"points", l.points}, {"slope", number(l.slope)},
                   {"intercept", number(l.intercept)}, {"r2", number(l.r2)}});
  return arr;
}

}  // namespace ymm
