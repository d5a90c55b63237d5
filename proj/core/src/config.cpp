#include "utmq/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "utmq/contour.hpp"
#include "utmq/errors.hpp"
#include "utmq/fd.hpp"

#include <json.hpp>

namespace utmq {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_number(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || trim(end)[0] != '\0')
    throw ConfigError("config: '" + s + "' is not a number (" + what + ")");
  return v;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Config Config::parse_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto semi = line.find(';');
    if (semi != std::string::npos) line.erase(semi);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      cfg.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    Entry e;
    e.key = trim(line.substr(0, eq));
    e.value = trim(line.substr(eq + 1));
    if (e.key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    for (const auto& prev : cfg.sections_[section])
      if (prev.key == e.key)
        throw ConfigError("config: duplicate key '" + e.key + "' in [" + section + "]");
    cfg.sections_[section].push_back(std::move(e));
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

const Config::Entry* Config::find(const std::string& sec, const std::string& key) const {
  auto it = sections_.find(sec);
  if (it == sections_.end()) return nullptr;
  for (const auto& e : it->second)
    if (e.key == key) return &e;
  return nullptr;
}

bool Config::has(const std::string& sec, const std::string& key) const {
  return find(sec, key) != nullptr;
}

std::string Config::get(const std::string& sec, const std::string& key) {
  const Entry* e = find(sec, key);
  if (!e) throw ConfigError("config: missing key '" + key + "' in [" + sec + "]");
  e->used = true;
  return e->value;
}

std::string Config::get_or(const std::string& sec, const std::string& key, std::string dflt) {
  const Entry* e = find(sec, key);
  if (!e) return dflt;
  e->used = true;
  return e->value;
}

double Config::get_num(const std::string& sec, const std::string& key) {
  return parse_number(get(sec, key), sec + "." + key);
}

double Config::get_num_or(const std::string& sec, const std::string& key, double dflt) {
  const Entry* e = find(sec, key);
  if (!e) return dflt;
  e->used = true;
  return parse_number(e->value, sec + "." + key);
}

int Config::get_int_or(const std::string& sec, const std::string& key, int dflt) {
  return int(std::lround(get_num_or(sec, key, double(dflt))));
}

std::vector<std::string> Config::get_strings(const std::string& sec, const std::string& key) {
  std::vector<std::string> out;
  std::stringstream ss(get(sec, key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> Config::get_list(const std::string& sec, const std::string& key) {
  std::vector<double> out;
  for (const auto& s : get_strings(sec, key)) out.push_back(parse_number(s, sec + "." + key));
  return out;
}

std::vector<double> Config::get_list_or(const std::string& sec, const std::string& key,
                                        std::vector<double> dflt) {
  if (!has(sec, key)) return dflt;
  return get_list(sec, key);
}

std::map<std::string, double> Config::take_params(const std::string& sec,
                                                  const std::string& prefix) {
  std::map<std::string, double> out;
  auto it = sections_.find(sec);
  if (it == sections_.end()) return out;
  for (const auto& e : it->second) {
    if (e.key.rfind(prefix + ".", 0) == 0) {
      e.used = true;
      out[e.key.substr(prefix.size() + 1)] = parse_number(e.value, sec + "." + e.key);
    }
  }
  return out;
}

void Config::reject_unused() const {
  for (const auto& [sec, entries] : sections_)
    for (const auto& e : entries)
      if (!e.used)
        throw ConfigError("config: unknown key '" + e.key + "' in [" + sec + "]");
}

// ----- problem / request construction ----------------------------------------

ProblemData problem_from_config(Config& cfg) {
  ProblemData data;
  const std::string fam = cfg.get_or("problem", "family", "biharmonic");
  if (fam == "biharmonic")
    data.family = Family::BIHARMONIC;
  else if (fam == "ch_plus")
    data.family = Family::CH_PLUS;
  else if (fam == "ch_minus")
    data.family = Family::CH_MINUS;
  else
    throw ConfigError("config: unknown family '" + fam + "'");
  data.alpha = cfg.get_num_or("problem", "alpha", 0.0);
  data.beta = cfg.get_num_or("problem", "beta", 1.0);

  data.u0 = make_half_line(cfg.get_or("problem", "u0", "zero"), cfg.take_params("problem", "u0"));
  data.g0 = make_time_signal(cfg.get_or("problem", "g0", "zero"), cfg.take_params("problem", "g0"));
  data.g1 = make_time_signal(cfg.get_or("problem", "g1", "zero"), cfg.take_params("problem", "g1"));
  const std::string fx = cfg.get_or("problem", "f_x", "");
  const std::string ft = cfg.get_or("problem", "f_t", "");
  if (fx.empty() != ft.empty())
    throw ConfigError("config: forcing needs both f_x and f_t presets");
  if (!fx.empty()) {
    SeparableTerm term{make_half_line(fx, cfg.take_params("problem", "f_x")),
                       make_time_signal(ft, cfg.take_params("problem", "f_t"))};
    data.f.terms.push_back(std::move(term));
  }
  data.validate();
  return data;
}

EvalRequest eval_from_config(Config& cfg) {
  EvalRequest req;
  const auto xs = cfg.get_list("eval", "x");
  const auto ts = cfg.get_list("eval", "t");
  const std::string mode = cfg.get_or("eval", "points", "grid");
  if (mode == "grid") {
    for (double t : ts)
      for (double x : xs) req.points.push_back({x, t});
  } else if (mode == "pairs") {
    if (xs.size() != ts.size())
      throw ConfigError("config: eval pairs need matching x and t lists");
    for (std::size_t k = 0; k < xs.size(); ++k) req.points.push_back({xs[k], ts[k]});
  } else {
    throw ConfigError("config: eval points must be 'grid' or 'pairs'");
  }
  req.deriv_orders.clear();
  for (const std::string& s : [&] {
         std::vector<std::string> v;
         if (cfg.has("eval", "derivs")) v = cfg.get_strings("eval", "derivs");
         else v = {"0:0"};
         return v;
       }()) {
    const auto colon = s.find(':');
    if (colon == std::string::npos)
      throw ConfigError("config: derivs entries look like n:m");
    req.deriv_orders.push_back({int(parse_number(s.substr(0, colon), "derivs")),
                                int(parse_number(s.substr(colon + 1), "derivs"))});
  }
  if (cfg.has("eval", "ehrenpreis_T")) req.ehrenpreis_T = cfg.get_num("eval", "ehrenpreis_T");
  req.validate();
  return req;
}

// ----- artifact writers -------------------------------------------------------

namespace {

namespace fs = std::filesystem;
using njson = nlohmann::json;

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

std::string plot_script(const std::string& command, const std::string& ylabel,
                        const std::string& using_spec, bool logscale) {
  std::string s;
  s += "# gnuplot script for " + command + " results\n";
  s += "set datafile separator ','\n";
  s += "set key autotitle columnhead\n";
  s += "set xlabel 'x or t'\n";
  s += "set ylabel '" + ylabel + "'\n";
  if (logscale) s += "set logscale xy\n";
  s += "plot 'results.csv' using " + using_spec + " with linespoints\n";
  s += "pause -1\n";
  return s;
}

struct Artifacts {
  std::string csv;
  njson report;
  std::string plot;
};

void emit(const RunResult& run, const Artifacts& art) {
  fs::create_directories(run.out_dir);
  write_file(fs::path(run.out_dir) / "results.csv", art.csv);
  njson rep = art.report;
  rep["schema_version"] = 1;
  rep["command"] = run.command;
  rep["ok"] = run.ok;
  njson checks = njson::array();
  for (const auto& c : run.checks)
    checks.push_back({{"name", c.name},
                      {"pass", c.pass},
                      {"value", c.value},
                      {"threshold", c.threshold}});
  rep["checks"] = checks;
  write_file(fs::path(run.out_dir) / "report.json", rep.dump(2) + "\n");
  write_file(fs::path(run.out_dir) / "plot.gp", art.plot);
}

SolveOptions solve_options(Config& cfg, const CliOverrides& ov) {
  SolveOptions opt;
  opt.tol = cfg.get_num_or("quadrature", "tol", 1e-9);
  if (ov.tol) opt.tol = *ov.tol;
  if (ov.threads) opt.threads = *ov.threads;
  const std::string rep = cfg.get_or("quadrature", "representation", "auto");
  if (rep == "auto") opt.representation = Representation::automatic;
  else if (rep == "ray") opt.representation = Representation::ray;
  else if (rep == "boundary") opt.representation = Representation::boundary;
  else throw ConfigError("config: representation must be auto, ray or boundary");
  opt.exact_transforms = cfg.get_int_or("quadrature", "exact_transforms", 1) != 0;
  return opt;
}

}  // namespace

RunResult run_command(Config& cfg, const CliOverrides& overrides) {
  RunResult run;
  run.command = cfg.get("", "command");
  run.out_dir = overrides.out_dir ? *overrides.out_dir : cfg.get_or("output", "dir", "out");
  // consumed for determinism bookkeeping; sampled commands derive their grids
  // from it
  const double seed = cfg.get_num_or("", "seed", 1.0);
  (void)seed;

  Artifacts art;
  const SolveOptions opt = solve_options(cfg, overrides);

  if (run.command == "solve") {
    ProblemData data = problem_from_config(cfg);
    EvalRequest req = eval_from_config(cfg);
    cfg.reject_unused();
    const SolutionField field = solve(data, req, opt);
    std::string csv = "x,t,n,m,re_value,im_value,abs_err_est\n";
    for (std::size_t p = 0; p < field.n_points; ++p)
      for (std::size_t o = 0; o < field.n_orders; ++o) {
        csv += fmt17(req.points[p].first) + "," + fmt17(req.points[p].second) + "," +
               std::to_string(req.deriv_orders[o].first) + "," +
               std::to_string(req.deriv_orders[o].second) + "," +
               fmt17(field.at(p, o).real()) + "," + fmt17(field.at(p, o).imag()) + "," +
               fmt17(field.err(p, o)) + "\n";
      }
    art.csv = csv;
    art.plot = plot_script(run.command, "u", "1:5", false);
    art.report["points"] = field.n_points;
    art.report["warnings"] = field.warnings;
    run.ok = true;
    emit(run, art);
    return run;
  }

  if (run.command == "trace-check") {
    ProblemData data = problem_from_config(cfg);
    const auto eps = cfg.get_list_or("trace_check", "eps", {0.1, 0.03, 0.01});
    const double t0 = cfg.get_num_or("trace_check", "t0", 1.0);
    const double x0 = cfg.get_num_or("trace_check", "x0", 2.5);
    const auto tl = cfg.get_list_or("trace_check", "t_list", {0.1, 0.03, 0.01});
    cfg.reject_unused();

    EvalRequest req;
    for (double e : eps) req.points.push_back({e, t0});
    req.deriv_orders = {{0, 0}, {1, 0}};
    const SolutionField near_bnd = solve(data, req, opt);

    EvalRequest req2;
    for (double t : tl) req2.points.push_back({x0, t});
    const SolutionField near_init = solve(data, req2, opt);

    std::string csv = "probe,param,value,target,abs_err\n";
    std::vector<double> e_g0, e_g1, e_u0;
    for (std::size_t k = 0; k < eps.size(); ++k) {
      e_g0.push_back(std::abs(near_bnd.at(k, 0) - data.g0(t0)));
      e_g1.push_back(std::abs(near_bnd.at(k, 1) - data.g1(t0)));
      csv += "g0," + fmt17(eps[k]) + "," + fmt17(near_bnd.at(k, 0).real()) + "," +
             fmt17(data.g0(t0)) + "," + fmt17(e_g0.back()) + "\n";
      csv += "g1," + fmt17(eps[k]) + "," + fmt17(near_bnd.at(k, 1).real()) + "," +
             fmt17(data.g1(t0)) + "," + fmt17(e_g1.back()) + "\n";
    }
    for (std::size_t k = 0; k < tl.size(); ++k) {
      e_u0.push_back(std::abs(near_init.at(k) - data.u0(x0)));
      csv += "u0," + fmt17(tl[k]) + "," + fmt17(near_init.at(k).real()) + "," +
             fmt17(data.u0(x0)) + "," + fmt17(e_u0.back()) + "\n";
    }
    auto decreasing = [](const std::vector<double>& v) {
      for (std::size_t k = 1; k < v.size(); ++k)
        if (v[k] >= v[k - 1]) return false;
      return true;
    };
    const double thr_g0 = 1e-3 * (1.0 + std::abs(data.g0(t0)));
    const double thr_g1 = 1e-3 * (1.0 + std::abs(data.g1(t0)));
    const double thr_u0 = 1e-3 * (1.0 + std::abs(data.u0(x0)));
    run.checks.push_back({"g0_monotone", decreasing(e_g0), e_g0.back(), 0.0});
    run.checks.push_back({"g0_final", e_g0.back() <= thr_g0, e_g0.back(), thr_g0});
    run.checks.push_back({"g1_monotone", decreasing(e_g1), e_g1.back(), 0.0});
    run.checks.push_back({"g1_final", e_g1.back() <= thr_g1, e_g1.back(), thr_g1});
    run.checks.push_back({"u0_monotone", decreasing(e_u0), e_u0.back(), 0.0});
    run.checks.push_back({"u0_final", e_u0.back() <= thr_u0, e_u0.back(), thr_u0});
    art.csv = csv;
    art.plot = plot_script(run.command, "abs error", "2:5", true);
    run.ok = std::all_of(run.checks.begin(), run.checks.end(),
                         [](const CheckResult& c) { return c.pass; });
    emit(run, art);
    return run;
  }

  if (run.command == "compare-fd") {
    ProblemData data = problem_from_config(cfg);
    FDGrid grid;
    grid.L = cfg.get_num_or("compare_fd", "L", 40.0);
    grid.nx = cfg.get_int_or("compare_fd", "nx", 2048);
    grid.t_end = cfg.get_num_or("compare_fd", "t_end", 1.0);
    grid.dt = cfg.get_num_or("compare_fd", "dt", 0.0);
    const auto xs = cfg.get_list("compare_fd", "x");
    const auto ts = cfg.get_list("compare_fd", "t");
    const double thr = cfg.get_num_or("compare_fd", "rel_linf", 1e-3);
    cfg.reject_unused();

    const FDField fd = fd_solve(data, grid);
    EvalRequest req;
    for (double t : ts)
      for (double x : xs) req.points.push_back({x, t});
    const SolutionField field = solve(data, req, opt);
    std::vector<cx> vals(field.values.begin(), field.values.end());
    const CompareTable table = compare(vals, req.points, fd);

    std::string csv = "x,t,utm,fd,abs_err,rel_err\n";
    for (const auto& r : table.rows)
      csv += fmt17(r.x) + "," + fmt17(r.t) + "," + fmt17(r.utm.real()) + "," +
             fmt17(r.fd) + "," + fmt17(r.abs_err) + "," + fmt17(r.rel_err) + "\n";
    art.csv = csv;
    art.plot = plot_script(run.command, "abs error", "1:5", false);
    art.report["warnings"] = table.warnings;
    run.checks.push_back({"rel_linf", table.linf_rel <= thr, table.linf_rel, thr});
    run.ok = run.checks.front().pass;
    emit(run, art);
    return run;
  }

  if (run.command == "periodicity") {
    ProblemData data = problem_from_config(cfg);
    const double x0 = cfg.get_num_or("periodicity", "x0", 1.0);
    const double T = cfg.get_num_or("periodicity", "T", 1.0);
    auto t_grid = cfg.get_list_or("periodicity", "t_grid", {});
    if (t_grid.empty())
      for (double t = 8.0; t <= 64.0 * 1.0001; t *= std::sqrt(2.0)) t_grid.push_back(t);
    cfg.reject_unused();
    const PeriodicityFit fit = periodicity_analysis(data, x0, T, t_grid, opt);
    std::string csv = "t,diff\n";
    for (auto [t, dv] : fit.samples) csv += fmt17(t) + "," + fmt17(dv) + "\n";
    art.csv = csv;
    art.plot = plot_script(run.command, "|diff|", "1:(abs($2))", true);
    art.report["fitted_exponent"] = fit.fitted_exponent;
    art.report["fit_residual"] = fit.fit_residual;
    art.report["C1_fit"] = fit.C1_fit;
    art.report["C1_laplace"] = fit.C1_laplace;
    run.checks.push_back({"fit_residual", fit.fit_residual <= 0.1, fit.fit_residual, 0.1});
    run.ok = run.checks.front().pass;
    emit(run, art);
    return run;
  }

  if (run.command == "nonuniqueness-demo") {
    const double alpha = cfg.get_num_or("nonuniqueness", "alpha", 1.0);
    const double beta = cfg.get_num_or("nonuniqueness", "beta", 1.0);
    const double r = cfg.get_num_or("nonuniqueness", "r", 1.5);
    const auto xs = cfg.get_list_or("nonuniqueness", "x", {0.1, 0.2, 0.4, 0.8});
    const auto ts = cfg.get_list_or("nonuniqueness", "t",
                                    {3e-6, 1e-5, 1e-4, 1e-3, 0.01, 0.1});
    const double thr = cfg.get_num_or("nonuniqueness", "ratio_threshold", 1e6);
    const auto sweep_x_cfg = cfg.get_list_or("nonuniqueness", "sweep_x", {0.05, 0.02, 0.01});
    const double sweep_t0_cfg = cfg.get_num_or("nonuniqueness", "sweep_t0", 1.0);
    const auto sweep_t_cfg = cfg.get_list_or("nonuniqueness", "sweep_t", {0.2, 0.1, 0.05});
    const double sweep_x0_cfg = cfg.get_num_or("nonuniqueness", "sweep_x0", 5.0);
    cfg.reject_unused();

    EvalRequest grid;
    for (double t : ts)
      for (double x : xs) grid.points.push_back({x, t});
    const NonUniquenessResult res = nonuniqueness_pair(alpha, beta, r, grid, opt);

    // boundary sweeps of the null solution
    EvalRequest bsweep;
    const std::vector<double>& bx = sweep_x_cfg;
    for (double x : bx) bsweep.points.push_back({x, sweep_t0_cfg});
    const std::vector<double>& bt = sweep_t_cfg;
    for (double t : bt) bsweep.points.push_back({sweep_x0_cfg, t});
    SolveOptions bopt = opt;
    bopt.tol = std::min(opt.tol, 1e-12);  // the sweep values sit many digits
                                          // below the cancelling ray pieces
    const NonUniquenessResult bres = nonuniqueness_pair(alpha, beta, r, bsweep, bopt);

    double interior_max = 0.0;
    for (const cx& v : res.v.values) interior_max = std::max(interior_max, std::abs(v));
    double boundary_max = 0.0;
    std::vector<double> xsweep, tsweep;
    for (std::size_t k = 0; k < 3; ++k) {
      xsweep.push_back(std::abs(bres.v.values[k]));
      tsweep.push_back(std::abs(bres.v.values[3 + k]));
      boundary_max = std::max({boundary_max, xsweep.back(), tsweep.back()});
    }
    const double ratio = interior_max / std::max(boundary_max, 1e-300);

    std::string csv = "x,t,abs_v,abs_U\n";
    for (std::size_t k = 0; k < grid.points.size(); ++k)
      csv += fmt17(grid.points[k].first) + "," + fmt17(grid.points[k].second) + "," +
             fmt17(std::abs(res.v.values[k])) + "," + fmt17(std::abs(res.U.values[k])) + "\n";
    art.csv = csv;
    art.plot = plot_script(run.command, "|v|", "1:3", true);
    art.report["boundary_max"] = boundary_max;
    art.report["interior_max"] = interior_max;
    art.report["ratio"] = ratio;

    auto decreasing = [](const std::vector<double>& v) {
      for (std::size_t k = 1; k < v.size(); ++k)
        if (v[k] >= v[k - 1]) return false;
      return true;
    };
    run.checks.push_back({"boundary_sweep_decreasing", decreasing(xsweep),
                          xsweep.back(), xsweep.front()});
    run.checks.push_back({"initial_sweep_decreasing", decreasing(tsweep),
                          tsweep.back(), tsweep.front()});
    run.checks.push_back({"interior_boundary_ratio", ratio >= thr, ratio, thr});
    run.ok = std::all_of(run.checks.begin(), run.checks.end(),
                         [](const CheckResult& c) { return c.pass; });
    emit(run, art);
    return run;
  }

  if (run.command == "half-value") {
    ProblemData data = problem_from_config(cfg);
    const auto ts = cfg.get_list_or("half_value", "t", {1.0});
    const bool assert_half = cfg.get_int_or("half_value", "assert_half",
                                            data.family == Family::BIHARMONIC ? 1 : 0) != 0;
    cfg.reject_unused();
    const auto results = half_value_check(data, ts, opt.tol);
    std::string csv = "t,re_value,im_value,ratio,R_used\n";
    bool all_pass = true;
    for (const auto& r : results) {
      const double ratio = r.ratio ? *r.ratio : std::nan("");
      csv += fmt17(r.t) + "," + fmt17(r.value.real()) + "," + fmt17(r.value.imag()) + "," +
             fmt17(ratio) + "," + fmt17(r.R_used) + "\n";
      if (assert_half && r.ratio) {
        const bool pass = std::abs(*r.ratio - 0.5) <= 0.01;
        all_pass &= pass;
        run.checks.push_back({"half_value_t" + fmt17(r.t), pass, *r.ratio, 0.5});
      }
    }
    art.csv = csv;
    art.plot = plot_script(run.command, "ratio", "1:4", false);
    run.ok = all_pass;
    emit(run, art);
    return run;
  }

  if (run.command == "contour-dump") {
    ProblemData data = problem_from_config(cfg);
    const double R = cfg.get_num_or("contour_dump", "truncation_R", 8.0);
    const int samples = cfg.get_int_or("contour_dump", "samples", 64);
    cfg.reject_unused();
    const Dispersion d = data.dispersion();
    std::string csv;
    if (data.family == Family::BIHARMONIC) {
      auto [g1, g2] = gamma_biharmonic();
      ContourPath both = g1;
      for (auto& s : g2.segments) both.segments.push_back(s);
      dump_contour_csv(both, d, std::size_t(samples), R, csv);
    } else {
      const ContourPath boundary = domega_boundary(d, R);
      dump_contour_csv(boundary, d, std::size_t(samples), R, csv);
      // cut set of the branch
      ContourPath cuts;
      cuts.label = "cuts";
      cuts.disjoint = true;
      const double c = d.cut_start();
      if (data.family == Family::CH_PLUS) {
        cuts.segments.push_back(make_segment(cx(0.0, c), cx(0.0, R)));
        cuts.segments.push_back(make_segment(cx(0.0, -c), cx(0.0, -R)));
      } else {
        cuts.segments.push_back(make_segment(cx(-c, 0.0), cx(c, 0.0)));
        cuts.segments.push_back(make_segment(cx(0.0, -R), cx(0.0, R)));
      }
      std::string cut_csv;
      dump_contour_csv(cuts, d, std::size_t(samples), R, cut_csv);
      // strip the duplicate header, renumber by offset
      const auto nl = cut_csv.find('\n');
      csv += "# cut set\n" + cut_csv.substr(nl + 1);
    }
    art.csv = csv;
    art.plot = plot_script(run.command, "Im lambda", "3:4", false);
    run.ok = true;
    emit(run, art);
    return run;
  }

  if (run.command == "global-relation") {
    ProblemData data = problem_from_config(cfg);
    const double t = cfg.get_num_or("global_relation", "t", 1.0);
    const double thr = cfg.get_num_or("global_relation", "threshold", 1e-5);
    std::vector<cx> lambdas;
    if (cfg.has("global_relation", "lambda_re")) {
      const auto re = cfg.get_list("global_relation", "lambda_re");
      const auto im = cfg.get_list_or("global_relation", "lambda_im",
                                      std::vector<double>(re.size(), 0.0));
      if (im.size() != re.size())
        throw ConfigError("config: lambda_re and lambda_im lengths differ");
      for (std::size_t k = 0; k < re.size(); ++k) lambdas.push_back({re[k], im[k]});
    } else {
      for (int k = -5; k <= 5; ++k)
        if (k != 0) lambdas.push_back({double(k), 0.0});
      lambdas.push_back({-1.0, -1.0});
      lambdas.push_back({-3.0, -2.0});
    }
    GlobalRelationOptions gopt;
    gopt.tol = opt.tol;
    gopt.threads = opt.threads;
    cfg.reject_unused();
    const auto residuals = global_relation_residual(data, t, lambdas, gopt);
    std::string csv = "re_lambda,im_lambda,residual\n";
    double worst = 0.0;
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
      csv += fmt17(lambdas[k].real()) + "," + fmt17(lambdas[k].imag()) + "," +
             fmt17(residuals[k]) + "\n";
      worst = std::max(worst, residuals[k]);
    }
    art.csv = csv;
    art.plot = plot_script(run.command, "residual", "1:3", false);
    run.checks.push_back({"residual_max", worst <= thr, worst, thr});
    run.ok = run.checks.front().pass;
    emit(run, art);
    return run;
  }

  throw ConfigError("config: unknown command '" + run.command + "'");
}

}  // namespace utmq
