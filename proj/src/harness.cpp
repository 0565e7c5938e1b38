#include "srfb/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace srfb {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

Matrix to_matrix(const json& rows) {
  const auto m = static_cast<Index>(rows.size());
  const auto n = static_cast<Index>(rows.at(0).size());
  Matrix out(m, n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) out(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get<double>();
  }
  return out;
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

Vector to_vector(const json& arr) { return to_vector(arr.get<std::vector<double>>()); }

Vector start_point(const std::optional<std::vector<double>>& given, Index dim, bool vertex,
                   const std::string& name) {
  if (given) {
    if (static_cast<Index>(given->size()) != dim) {
      throw ConfigError(name + " has length " + std::to_string(given->size()) + ", expected " +
                        std::to_string(dim));
    }
    return to_vector(*given);
  }
  Vector x = Vector::Zero(dim);
  if (vertex) x(0) = 1.0;
  return x;
}

std::pair<ResolvableOperator, ProxFunction> build_resolvent(const json& r, Index dim) {
  const std::string kind = r.at("kind");
  if (kind == "zero") return {ResolvableOperator::zero(dim), ProxFunction::zero(dim)};
  if (kind == "scaled_identity") {
    const double nu = r.at("nu");
    return {ResolvableOperator::scaled_identity(dim, nu),
            nu > 0.0 ? ProxFunction::squared_l2(dim, nu) : ProxFunction::zero(dim)};
  }
  ProxFunction f = ProxFunction::zero(dim);
  if (kind == "l1") {
    f = ProxFunction::l1(dim, r.at("weight"));
  } else if (kind == "squared_l2") {
    f = ProxFunction::squared_l2(dim, r.at("weight"));
  } else if (kind == "box") {
    f = ProxFunction::box_indicator(to_vector(r.at("lower")), to_vector(r.at("upper")));
  } else if (kind == "ball") {
    f = ProxFunction::ball_indicator(to_vector(r.at("center")), r.at("radius"));
  } else if (kind == "simplex") {
    f = ProxFunction::simplex_indicator(dim);
  }
  return {ResolvableOperator::subdifferential(f), f};
}

MonotoneMap build_map(const json& m, Index dim) {
  const std::string kind = m.at("kind");
  if (kind == "zero") return MonotoneMap::zero(dim);
  if (kind == "identity") return MonotoneMap::identity(dim);
  if (kind == "affine") {
    const Matrix skew = m.contains("skew") ? to_matrix(m["skew"]) : Matrix::Zero(dim, dim);
    const Matrix psd = m.contains("psd") ? to_matrix(m["psd"]) : Matrix::Zero(dim, dim);
    const Vector shift = m.contains("shift") ? to_vector(m["shift"]) : Vector::Zero(dim);
    return MonotoneMap::affine(skew, psd, shift);
  }
  std::vector<MonotoneMap> comps;
  for (const auto& c : m.at("components")) comps.push_back(build_map(c, dim));
  return MonotoneMap::mean(std::move(comps));
}

InclusionProblem build_inclusion(const json& p) {
  const std::string kind = p.at("kind");
  if (kind == "affine") {
    InclusionProblem prob =
        p.contains("skew") ? make_affine_inclusion(p.at("nu").get<double>(), to_matrix(p["skew"]),
                                                   to_vector(p["shift"]))
                           : make_affine_inclusion(p.at("dim").get<Index>(), p.at("nu").get<double>(),
                                                   p.at("skew_scale").get<double>(),
                                                   p.at("seed").get<std::uint64_t>());
    const Index d = prob.dim();
    prob.f = prob.nu > 0.0 ? ProxFunction::squared_l2(d, prob.nu) : ProxFunction::zero(d);
    return prob;
  }
  if (kind == "lasso") {
    return make_lasso(to_matrix(p.at("design")), to_vector(p.at("targets")), p.at("lambda").get<double>());
  }
  const Index dim = p.at("dim").get<Index>();
  auto [a, f] = build_resolvent(p.at("resolvent"), dim);
  std::vector<MonotoneMap> comps;
  if (p.at("map").at("kind") == "finite_sum") {
    for (const auto& c : p["map"]["components"]) comps.push_back(build_map(c, dim));
  }
  MonotoneMap b = build_map(p.at("map"), dim);
  std::optional<Vector> zero;
  if (p.contains("known_zero")) zero = to_vector(p["known_zero"]);
  const double mu = b.lipschitz();
  const double nu = a.modulus();
  return InclusionProblem{"inclusion", a, b, std::move(comps), f, std::nullopt, zero, mu, nu};
}

StepSchedule build_schedule(const json& s, double bound) {
  const std::string kind = s.at("kind");
  if (kind == "constant") {
    if (s.contains("gamma")) return StepSchedule::constant(s["gamma"].get<double>());
    if (!std::isfinite(bound)) {
      throw ConfigError("schedule.fraction_of_bound needs a problem with positive Lipschitz constant");
    }
    return StepSchedule::constant(s["fraction_of_bound"].get<double>() * bound);
  }
  if (kind == "band") return StepSchedule::band(s.at("c").get<double>(), s.at("gamma").get<double>());
  if (kind == "strongly_monotone") return StepSchedule::strongly_monotone(s.at("nu").get<double>());
  return StepSchedule::power(s.at("gamma0").get<double>(), s.at("p").get<double>());
}

NoiseModel build_noise(const json& o, const std::optional<InclusionProblem>& inclusion) {
  const std::string kind = o.at("kind");
  if (kind == "exact") return NoiseModel::exact();
  if (kind == "gaussian") {
    const json& v = o.at("variance");
    const std::string vk = v.at("kind");
    if (vk == "zero") return NoiseModel::gaussian(VarianceSchedule::zero());
    if (vk == "constant") return NoiseModel::gaussian(VarianceSchedule::constant(v.at("c")));
    return NoiseModel::gaussian(VarianceSchedule::power(v.at("c"), v.at("p")));
  }
  if (!inclusion || inclusion->components.empty()) {
    throw ConfigError("minibatch oracle needs a finite-sum problem");
  }
  return NoiseModel::minibatch(inclusion->components, o.at("batch").get<int>());
}

double pd_mu(const SaddleProblem& p) { return 2.0 * std::max(p.mu_h(), p.mu_l()) + p.norm_k; }

json verdicts_json(const Admissibility& a) {
  json out = json::array();
  for (const auto& v : a.verdicts) {
    json conds = json::array();
    for (const auto& c : v.conditions) conds.push_back({{"name", c.name}, {"holds", c.holds}, {"detail", c.detail}});
    out.push_back({{"name", v.name}, {"holds", v.holds}, {"conditions", conds}});
  }
  return out;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string csv_name(std::size_t i, std::uint64_t seed) {
  return "run_" + std::to_string(i) + "_seed_" + std::to_string(seed) + ".csv";
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<std::vector<std::string>> read_csv_rows(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open " + file.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(std::move(cells));
  }
  return rows;
}

// Writes "n value" lines for one column of a CSV with a header row.
void csv_column_to_dat(const fs::path& csv, const std::string& column, const fs::path& dat) {
  const auto rows = read_csv_rows(csv);
  if (rows.empty()) return;
  const auto& header = rows.front();
  const auto it = std::find(header.begin(), header.end(), column);
  if (it == header.end()) return;
  const auto col = static_cast<std::size_t>(it - header.begin());
  std::ostringstream out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (col < rows[r].size() && !rows[r][col].empty()) out << rows[r][0] << ' ' << rows[r][col] << '\n';
  }
  write_file(dat, out.str());
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string records_csv(const std::vector<RunRecord>& records) {
  std::string out = "n,gamma,dist_sq,resid,draw_err_sq,ergodic_gap,wall_ns\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& r : records) {
    out += std::to_string(r.n);
    out += ',' + format_double(r.gamma);
    out += ',' + opt(r.dist_sq);
    out += ',' + format_double(r.resid);
    out += ',' + opt(r.draw_err_sq);
    out += ',' + opt(r.ergodic_gap);
    out += ',' + (r.wall_ns ? std::to_string(*r.wall_ns) : std::string());
    out += '\n';
  }
  return out;
}

BuiltExperiment build_experiment(const ExperimentConfig& cfg) {
  BuiltExperiment b;
  double bound = std::numeric_limits<double>::infinity();
  try {
    if (cfg.is_saddle()) {
      const json& p = cfg.problem;
      const Matrix payoff = to_matrix(p.at("payoff"));
      b.saddle = p.at("kind") == "matrix_game" ? make_matrix_game(payoff)
                                               : make_smoothed_saddle(payoff, p.at("beta").get<double>());
      const double mu = pd_mu(*b.saddle);
      if (mu > 0.0) bound = 0.5 / mu;
      b.x0 = start_point(cfg.x0, b.saddle->primal_dim(), true, "x0");
      b.x_prev = cfg.x_prev ? start_point(cfg.x_prev, b.saddle->primal_dim(), true, "x_prev") : b.x0;
      b.v0 = start_point(cfg.v0, b.saddle->dual_dim(), true, "v0");
      b.v_prev = cfg.v_prev ? start_point(cfg.v_prev, b.saddle->dual_dim(), true, "v_prev") : b.v0;
    } else {
      b.inclusion = build_inclusion(cfg.problem);
      const double mu = b.inclusion->mu;
      if (mu > 0.0) bound = cfg.solver == SolverKind::frb ? 0.5 / mu : kSqrt2MinusOne / mu;
      b.x0 = start_point(cfg.x0, b.inclusion->dim(), false, "x0");
      b.x_prev = cfg.x_prev ? start_point(cfg.x_prev, b.inclusion->dim(), false, "x_prev") : b.x0;
    }
    b.schedule = build_schedule(cfg.schedule, bound);
    b.noise = build_noise(cfg.oracle, b.inclusion);
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  return b;
}

namespace {

LoopConfig loop_config(const ExperimentConfig& cfg, const BuiltExperiment& built, bool force) {
  LoopConfig lc;
  lc.kind = cfg.solver;
  lc.schedule = built.schedule;
  lc.budget = cfg.budget;
  lc.record_every = cfg.record_every;
  lc.stop_tolerance = cfg.stop_tolerance;
  lc.force = force;
  lc.record_wall_time = cfg.record_wall_time;
  return lc;
}

MonotoneMap saddle_gradient_h(const SaddleProblem& p) { return p.h.gradient; }
MonotoneMap saddle_gradient_l(const SaddleProblem& p) { return p.l.gradient; }

}  // namespace

Admissibility assess_experiment(const ExperimentConfig& cfg, const BuiltExperiment& built) {
  const LoopConfig lc = loop_config(cfg, built, false);
  if (built.saddle) {
    const StochasticOracle h(saddle_gradient_h(*built.saddle), built.noise, 0, 0);
    const StochasticOracle l(saddle_gradient_l(*built.saddle), built.noise, 0, 1);
    return assess(*built.saddle, h, l, lc);
  }
  const StochasticOracle o(built.inclusion->B, built.noise, 0, 0);
  return assess(*built.inclusion, o, lc);
}

RunResult run_seed(const ExperimentConfig& cfg, const BuiltExperiment& built, std::uint64_t seed) {
  const LoopConfig lc = loop_config(cfg, built, true);
  if (built.saddle) {
    StochasticOracle h(saddle_gradient_h(*built.saddle), built.noise, seed, 0);
    StochasticOracle l(saddle_gradient_l(*built.saddle), built.noise, seed, 1);
    return run(*built.saddle, h, l, lc, built.x0, built.v0, built.x_prev, built.v_prev);
  }
  StochasticOracle o(built.inclusion->B, built.noise, seed, 0);
  return run(*built.inclusion, o, lc, built.x0, built.x_prev);
}

Metric primary_metric(const ExperimentConfig& /*cfg*/, const BuiltExperiment& built) {
  if (built.inclusion && built.inclusion->known_zero) return Metric::dist_sq;
  if (built.saddle && built.saddle->kind != SaddleKind::generic) return Metric::ergodic_gap;
  return Metric::resid;
}

std::optional<double> target_slope(const ExperimentConfig& cfg) {
  if (cfg.solver == SolverKind::spd) return -1.0;
  if ((cfg.solver == SolverKind::srfb || cfg.solver == SolverKind::srpg) &&
      cfg.schedule.at("kind") == "strongly_monotone") {
    return -1.0;
  }
  return std::nullopt;
}

RunSummary execute(const ExperimentConfig& cfg, const ExecuteOptions& opts) {
  const auto started = std::chrono::steady_clock::now();
  const BuiltExperiment built = build_experiment(cfg);
  const Admissibility adm = assess_experiment(cfg, built);
  if (!opts.force && !adm.admissible()) throw InadmissibleRun(adm);

  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);

  RunSummary summary;
  summary.runs = run_seeds<RunResult>(
      cfg.seeds,
      [&](std::uint64_t seed) { return run_seed(cfg, built, seed); }, opts.execution);
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
    write_file(dir / csv_name(i, cfg.seeds[i]), records_csv(summary.runs[i].records));
  }

  const Metric metric = primary_metric(cfg, built);
  json doc;
  doc["digest"] = config_digest(cfg);
  doc["config"] = to_json(cfg);
  doc["metric"] = to_string(metric);

  json problem;
  problem["kind"] = cfg.problem.at("kind");
  if (built.inclusion) {
    problem["dim"] = built.inclusion->dim();
    problem["mu"] = built.inclusion->mu;
    problem["nu_a"] = built.inclusion->A.modulus();
    problem["nu_b"] = built.inclusion->B.modulus();
    problem["reference_solution"] = built.inclusion->known_zero.has_value();
  } else {
    problem["primal_dim"] = built.saddle->primal_dim();
    problem["dual_dim"] = built.saddle->dual_dim();
    problem["mu_h"] = built.saddle->mu_h();
    problem["mu_l"] = built.saddle->mu_l();
    problem["norm_k"] = built.saddle->norm_k;
    problem["reference_solution"] = built.saddle->known_saddle.has_value();
  }
  doc["problem"] = problem;

  json sched;
  sched["kind"] = built.schedule.kind_name();
  sched["gamma_0"] = built.schedule(0);
  sched["sup"] = built.schedule.sup();
  if (built.inclusion) {
    sched["tau"] = tau(built.schedule, built.inclusion->mu);
    if (built.schedule.kind() == ScheduleKind::strongly_monotone) {
      sched["burn_in_n0"] = burn_in_n0(built.schedule.param_nu(), built.inclusion->mu);
    }
  } else {
    const PdScheduleReport pd = validate_pd_schedule(built.schedule, built.saddle->mu_h(),
                                                     built.saddle->mu_l(), built.saddle->norm_k);
    sched["pd_mu"] = pd.mu;
    sched["pd_bound"] = pd.bound;
    sched["pd_pass"] = pd.pass;
  }
  doc["schedule"] = sched;
  doc["admissibility"] = {{"admissible", adm.admissible()},
                          {"forced", opts.force && !adm.admissible()},
                          {"verdicts", verdicts_json(adm)}};

  json runs = json::array();
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
    const RunResult& r = summary.runs[i];
    json entry{{"seed", cfg.seeds[i]},
               {"csv", csv_name(i, cfg.seeds[i])},
               {"iterations", r.iterations},
               {"termination", to_string(r.termination)}};
    if (!r.records.empty()) {
      const RunRecord& last = r.records.back();
      entry["final"] = {{"n", last.n},
                        {"resid", last.resid},
                        {"dist_sq", optional_number(last.dist_sq)},
                        {"ergodic_gap", optional_number(last.ergodic_gap)}};
    } else {
      entry["final"] = nullptr;
    }
    runs.push_back(entry);
  }
  doc["runs"] = runs;

  // curve used for the rate fit: the seed mean when available, else seed 0
  std::vector<std::pair<double, double>> curve;
  doc["mean_curve"] = nullptr;
  if (cfg.seeds.size() >= 2) {
    std::size_t len = summary.runs.front().records.size();
    for (const auto& r : summary.runs) len = std::min(len, r.records.size());
    std::vector<std::vector<RunRecord>> aligned;
    for (const auto& r : summary.runs) {
      aligned.emplace_back(r.records.begin(), r.records.begin() + static_cast<std::ptrdiff_t>(len));
    }
    std::string text = "n,mean,stderr\n";
    if (len > 0) {
      const auto mean = aggregate_expectation(aligned, metric);
      for (const auto& m : mean) {
        text += std::to_string(m.n) + ',' + format_double(m.mean) + ',' + format_double(m.stderr_) + '\n';
        curve.emplace_back(static_cast<double>(m.n), m.mean);
      }
    }
    write_file(dir / "mean_curve.csv", text);
    doc["mean_curve"] = "mean_curve.csv";
  } else if (!summary.runs.front().records.empty()) {
    curve = metric_series(summary.runs.front().records, metric);
  }

  const double hi = cfg.fit_window ? cfg.fit_window->second : static_cast<double>(cfg.budget);
  const double lo = cfg.fit_window ? cfg.fit_window->first
                                   : std::max(1.0, static_cast<double>(cfg.budget / 100));
  json fit{{"window", {lo, hi}}, {"target", optional_number(target_slope(cfg))}};
  try {
    const RateFit f = fit_rate(curve, lo, hi);
    fit["slope"] = f.slope;
    fit["intercept"] = f.intercept;
    fit["points"] = f.points;
  } catch (const InvalidParameter& e) {
    fit["slope"] = nullptr;
    fit["error"] = e.what();
  }
  doc["fit"] = fit;
  doc["total_wall_ns"] =
      std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - started).count();

  summary.summary_path = dir / "summary.json";
  write_file(summary.summary_path, doc.dump(2) + "\n");
  summary.doc = std::move(doc);
  return summary;
}

void report(const std::vector<fs::path>& summaries, std::ostream& out) {
  if (summaries.empty()) throw ConfigError("report needs at least one summary.json");
  std::vector<std::string> missing;
  for (const auto& p : summaries) {
    if (!fs::exists(p)) missing.push_back(p.string());
  }
  if (!missing.empty()) {
    std::string msg = "missing summary files:";
    for (const auto& m : missing) msg += " " + m;
    throw ConfigError(msg);
  }

  out << std::left << std::setw(18) << "digest" << std::setw(17) << "problem" << std::setw(7) << "solver"
      << std::setw(7) << "seeds" << std::setw(13) << "metric" << std::setw(12) << "slope" << std::setw(8)
      << "target" << "admissible\n";
  for (const auto& path : summaries) {
    std::ifstream in(path);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
    const json& fit = doc.at("fit");
    std::string slope = "n/a";
    if (!fit.at("slope").is_null()) {
      std::ostringstream s;
      s << std::fixed << std::setprecision(4) << fit["slope"].get<double>();
      slope = s.str();
    }
    const std::string target = fit.at("target").is_null() ? "none" : format_double(fit["target"].get<double>());
    out << std::left << std::setw(18) << doc.at("digest").get<std::string>() << std::setw(17)
        << doc.at("problem").at("kind").get<std::string>() << std::setw(7)
        << doc.at("config").at("solver").get<std::string>() << std::setw(7) << doc.at("runs").size()
        << std::setw(13) << doc.at("metric").get<std::string>() << std::setw(12) << slope << std::setw(8)
        << target << (doc.at("admissibility").at("admissible").get<bool>() ? "yes" : "forced") << '\n';

    const fs::path dir = path.parent_path().empty() ? fs::path(".") : path.parent_path();
    const std::string metric = doc.at("metric");
    if (!doc.at("mean_curve").is_null()) {
      csv_column_to_dat(dir / doc["mean_curve"].get<std::string>(), "mean", dir / "mean_curve.dat");
    }
    for (const auto& r : doc.at("runs")) {
      fs::path csv = dir / r.at("csv").get<std::string>();
      if (!fs::exists(csv)) continue;
      fs::path dat = csv;
      dat.replace_extension(".dat");
      csv_column_to_dat(csv, metric, dat);
    }
  }
}

std::vector<fs::path> sweep(const fs::path& config_file, const std::string& param,
                            const std::vector<std::string>& values, const ExecuteOptions& opts) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  std::ifstream in(config_file);
  if (!in) throw ConfigError("cannot open config file " + config_file.string());
  json base;
  try {
    base = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  const fs::path base_dir = config_file.parent_path().empty() ? fs::path(".") : config_file.parent_path();
  const std::string root = base.value("output_dir", std::string("results"));

  std::vector<fs::path> out;
  for (const auto& raw : values) {
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::parse_error&) {
      value = raw;
    }
    json doc = base;
    set_dotted(doc, param, value);
    doc["output_dir"] = (fs::path(root) / (param + "=" + raw)).string();
    const ExperimentConfig cfg = parse_config(doc.dump(), base_dir);
    out.push_back(execute(cfg, opts).summary_path);
  }
  return out;
}

}  // namespace srfb
