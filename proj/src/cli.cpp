#include "hypdim/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>

#include "hypdim/cauchy.hpp"
#include "hypdim/constants_io.hpp"
#include "hypdim/juliadim.hpp"
#include "hypdim/numerics.hpp"
#include "hypdim/pressure.hpp"
#include "hypdim/transferop.hpp"
#include "hypdim/verify.hpp"

namespace hypdim::cli {

namespace {

using json = nlohmann::ordered_json;

class ConfigError : public DomainError {
public:
  using DomainError::DomainError;
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json cjson(Complex z) { return json::array({z.real(), z.imag()}); }

struct Session {
  RunConfig rc;
  std::ostream& out;

  unsigned workers() const { return rc.workers > 0 ? rc.workers : num::default_workers(); }

  std::filesystem::path out_path(const std::string& name) const {
    std::filesystem::create_directories(rc.out_dir);
    return std::filesystem::path(rc.out_dir) / name;
  }

  CalibratedConstants constants() const {
    CalibratedConstants c;
    if (!rc.constants.empty()) {
      c = load_constants(rc.constants);
    } else if (auto b = bundled_constants(rc.p)) {
      c = *b;
    } else {
      throw ConfigError("no constants cache for p = " + num(rc.p) +
                        "; run `hypdim calibrate` and pass --constants");
    }
    if (std::abs(c.p - rc.p) > 1e-12) {
      throw ConfigError("constants cache was calibrated for p = " + num(c.p) + ", not " + num(rc.p));
    }
    return c;
  }

  RadiusConfig radius(const CalibratedConstants& c) const {
    return RadiusConfig(rc.r.value_or(c.r0), c);
  }

  // l for the dynamics subcommands, checked against the disjoint-type threshold.
  double dynamics_l(const RadiusConfig& cfg, std::optional<double> l) const {
    const double v = l.value_or(cfg.l_min() + 1.0);
    check_disjoint(cfg, v);
    return v;
  }

  static void check_disjoint(const RadiusConfig& cfg, double l) {
    const double lmin = min_l_for_disjoint(cfg);
    if (!(l >= lmin)) {
      throw ConfigError("l = " + num(l) + " is below the disjoint-type threshold " + num(lmin));
    }
  }

  void write_text(const std::string& name, const std::string& text) const {
    const auto path = out_path(name);
    std::ofstream os(path, std::ios::binary);
    if (!os) {
      throw std::runtime_error("cannot write " + path.string());
    }
    os << text;
  }

  void emit(const json& j) const { out << j.dump() << "\n"; }
};

json constants_json(const CalibratedConstants& c) {
  return {{"p", c.p}, {"C", c.C}, {"D", c.D}, {"r0", c.r0}, {"K", c.K}, {"Kcal", c.Kcal}};
}

struct GridOpts {
  int nu = 512;
  int nv = 256;
  double u_span = 40.0;
  int n_max = 12;
  int base_points = 5;
  double rel_tail = 1e-6;

  void add(CLI::App* sub) {
    sub->add_option("--nu", nu, "lattice nodes in log|w|")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--nv", nv, "lattice nodes in arg w")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--u-span", u_span, "lattice extent in log|w| above log r")->capture_default_str();
    sub->add_option("--n-max", n_max, "operator iterations")->capture_default_str();
    sub->add_option("--base-points", base_points, "base points")->capture_default_str();
    sub->add_option("--rel-tail", rel_tail, "per-row relative tail tolerance")->capture_default_str();
  }

  PressureOptions options(unsigned workers) const {
    PressureOptions o;
    o.nu = nu;
    o.nv = nv;
    o.u_span = u_span;
    o.n_max = n_max;
    o.base_points = base_points;
    o.rel_tail = rel_tail;
    o.workers = workers;
    return o;
  }
};

// calibrate --------------------------------------------------------------

struct CalibrateOpts {
  CalibrationBudget budget;
  std::string save;
};

void cmd_calibrate(const Session& s, CalibrateOpts o) {
  o.budget.workers = s.workers();
  o.budget.seed = s.rc.seed;
  const CalibratedConstants c = calibrate(s.rc.p, o.budget);
  std::string path = o.save;
  if (path.empty()) {
    char name[64];
    std::snprintf(name, sizeof name, "constants_p%g.txt", s.rc.p);
    path = s.out_path(name).string();
  }
  save_constants(path, c);
  json j = {{"subcommand", "calibrate"}, {"path", path}};
  j["constants"] = constants_json(c);
  j["grid"] = c.grid_description;
  s.emit(j);
}

// eval -------------------------------------------------------------------

struct EvalOpts {
  double x = std::exp(2.0);
  double y = 0.0;
  double quad_tol = 1e-10;
};

void cmd_eval(const Session& s, const EvalOpts& o) {
  const CalibratedConstants c = s.constants();
  const ModelParams params(s.rc.p, s.rc.l.value_or(0.0));
  const Complex z(o.x, o.y);
  json j = {{"subcommand", "eval"}, {"p", params.p()}, {"l", params.l()}, {"z", cjson(z)}};
  // the model maps are undefined on the branch cut z - l <= 0
  try {
    const Complex u = tau_inner(z, params);
    j["tau_inner"] = cjson(u);
    j["tau_log"] = {{"log_abs", u.real()}, {"arg", wrap_angle(u.imag())}};
    if (const auto lf = log_f(z, params)) {
      j["f_log"] = {{"log_abs", lf->log_mod}, {"arg", lf->arg}};
    } else {
      j["f_log"] = nullptr;
    }
    if (u.real() <= kExpThreshold) {
      const Complex xi = std::exp(u);
      try {
        const Complex back = phi(xi, params);
        j["phi_of_tau"] = cjson(back);
        j["round_trip_rel_err"] = std::abs(back - z) / std::abs(z);
      } catch (const DomainError& e) {
        j["phi_of_tau"] = nullptr;
        j["phi_error"] = e.what();
      }
    }
  } catch (const DomainError& e) {
    j["model_error"] = e.what();
  }
  try {
    const EntirePoint e = eval_entire(z, params, c, o.quad_tol);
    j["E"] = {{"value", cjson(e.value)},
              {"deriv", cjson(e.deriv)},
              {"correction", cjson(e.value_correction)},
              {"in_tract", e.in_tract},
              {"err_est", e.err_est}};
  } catch (const DomainError& e) {
    // Deep in the tract: f only in log form plus the bounded correction.
    if (inner_formula_valid(z - params.l(), c)) {
      const TractEval te = eval_E_in_tract(z, params, c, o.quad_tol);
      j["E"] = {{"f_log", {{"log_abs", te.log_f.log_mod}, {"arg", te.log_f.arg}}},
                {"correction", cjson(te.correction.value)},
                {"in_tract", true},
                {"err_est", te.correction.err_est}};
    } else {
      j["E"] = {{"error", e.what()}};
    }
  }
  s.write_text("eval.json", j.dump(2) + "\n");
  s.emit(j);
}

// transfer ---------------------------------------------------------------

struct TransferOpts {
  std::vector<double> abs_w;
  double arg_w = 0.3;
  std::vector<double> t = {1.2, 1.5, 2.0};
  std::vector<double> l_list;
  bool entire = false;
  int refine_budget = 13;
  double eps_tail = 0.0;
  double quad_tol = 1e-10;
};

void cmd_transfer(const Session& s, TransferOpts o) {
  const CalibratedConstants c = s.constants();
  const RadiusConfig cfg = s.radius(c);
  if (o.l_list.empty()) {
    o.l_list.push_back(s.dynamics_l(cfg, s.rc.l));
  }
  for (double l : o.l_list) {
    Session::check_disjoint(cfg, l);
  }
  if (o.abs_w.empty()) {
    o.abs_w = num::geomspace(1.5 * cfg.r(), 1e6, 6);
  }
  for (double a : o.abs_w) {
    if (!(a > cfg.r())) {
      throw ConfigError("|w| = " + num(a) + " must exceed r = " + num(cfg.r()));
    }
  }
  for (double t : o.t) {
    if (!(t > 1.0)) {
      throw ConfigError("transfer needs t > 1");
    }
  }
  struct Job {
    double l, t, a;
  };
  std::vector<Job> jobs;
  for (double l : o.l_list) {
    for (double t : o.t) {
      for (double a : o.abs_w) {
        jobs.push_back({l, t, a});
      }
    }
  }
  std::vector<std::string> rows(jobs.size());
  num::parallel_for(jobs.size(), s.workers(), [&](std::size_t i) {
    const Job& jb = jobs[i];
    const ModelParams params(c.p, jb.l);
    const Complex w = std::polar(jb.a, o.arg_w);
    const TransferValue m = transfer_model(w, jb.t, params, cfg, o.eps_tail);
    std::string row = num(jb.l) + "," + num(jb.t) + "," + num(jb.a) + "," + num(o.arg_w) + "," +
                      num(m.value) + "," + num(m.tail_bound) + "," + std::to_string(m.K);
    if (o.entire) {
      const EntireTransferValue e =
          transfer_entire(w, jb.t, params, c, cfg, o.eps_tail, o.refine_budget, o.quad_tol);
      row += "," + num(e.value) + "," + num(e.tail_bound) + "," + std::to_string(e.refined) + "," +
             std::to_string(e.fallbacks) + "," + num(e.uncertainty_factor);
    }
    rows[i] = row;
  });
  std::string csv = "l,t,abs_w,arg_w,value,tail_bound,K";
  if (o.entire) {
    csv += ",entire_value,entire_tail_bound,refined,fallbacks,uncertainty_factor";
  }
  csv += "\n";
  for (const auto& r : rows) {
    csv += r + "\n";
  }
  s.write_text("transfer.csv", csv);
  s.emit({{"subcommand", "transfer"}, {"rows", rows.size()}, {"path", s.out_path("transfer.csv").string()}});
}

// pressure ---------------------------------------------------------------

struct PressureOpts {
  std::vector<double> t = {1.1, 1.3, 1.5, 2.0};
  GridOpts grid;
};

void cmd_pressure(const Session& s, const PressureOpts& o) {
  const CalibratedConstants c = s.constants();
  const RadiusConfig cfg = s.radius(c);
  const ModelParams params(c.p, s.dynamics_l(cfg, s.rc.l));
  std::string csv = "l,t,pressure,spread,n_used,operator_rel_tail\n";
  json points = json::array();
  for (double t : o.t) {
    const PressureEstimate e = pressure_estimate(t, params, cfg, o.grid.options(s.workers()));
    csv += num(params.l()) + "," + num(t) + "," + num(e.value) + "," + num(e.spread) + "," +
           std::to_string(e.n_used) + "," + num(e.operator_rel_tail) + "\n";
    points.push_back({{"t", t}, {"pressure", e.value}, {"spread", e.spread}});
  }
  s.write_text("pressure.csv", csv);
  s.emit({{"subcommand", "pressure"}, {"l", params.l()}, {"estimates", points},
          {"path", s.out_path("pressure.csv").string()}});
}

// hypdim -----------------------------------------------------------------

struct HypdimOpts {
  std::vector<double> l_list;
  double t_lo = BowenOptions{}.t_lo;
  double t_hi = BowenOptions{}.t_hi;
  double tol_t = BowenOptions{}.tol_t;
  double tol_P = BowenOptions{}.tol_P;
  GridOpts grid;
};

void cmd_hypdim(const Session& s, HypdimOpts o) {
  const CalibratedConstants c = s.constants();
  const RadiusConfig cfg = s.radius(c);
  if (o.l_list.empty()) {
    const double l0 = s.dynamics_l(cfg, s.rc.l);
    for (double f : {1.0, std::sqrt(10.0), 10.0, std::sqrt(1000.0), 100.0}) {
      o.l_list.push_back(l0 * f);
    }
  }
  for (double l : o.l_list) {
    Session::check_disjoint(cfg, l);
  }
  BowenOptions b;
  b.t_lo = o.t_lo;
  b.t_hi = o.t_hi;
  b.tol_t = o.tol_t;
  b.tol_P = o.tol_P;
  b.pressure = o.grid.options(s.workers());
  const SweepReport rep = hypdim_sweep(o.l_list, c.p, cfg, c.Kcal, b);
  std::string csv = "l,h,h_lo,h_hi,residual,spread,slope,noise_dominated,band_lo,band_hi,t_lo_used,error\n";
  json rows = json::array();
  for (const auto& r : rep.rows) {
    if (r.estimate) {
      const DimEstimate& e = *r.estimate;
      csv += num(r.l) + "," + num(e.value) + "," + num(e.lo) + "," + num(e.hi) + "," + num(e.residual) +
             "," + num(e.spread) + "," + num(e.slope) + "," + (e.noise_dominated ? "1" : "0") + "," +
             num(r.band_lo) + "," + num(r.band_hi) + "," + num(r.t_lo_used) + ",\n";
      rows.push_back({{"l", r.l}, {"h", e.value}, {"h_lo", e.lo}, {"h_hi", e.hi}});
    } else {
      csv += num(r.l) + ",,,,,,,,,," + num(r.t_lo_used) + ",\"" + r.error + "\"\n";
      rows.push_back({{"l", r.l}, {"error", r.error}});
    }
  }
  s.write_text("hypdim.csv", csv);
  s.write_text("hypdim_trend.txt", rep.trend + "\n");
  s.emit({{"subcommand", "hypdim"}, {"rows", rows}, {"non_increasing", rep.non_increasing},
          {"path", s.out_path("hypdim.csv").string()}});
}

// julia ------------------------------------------------------------------

struct JuliaOpts {
  int width = 1024;
  int height = 1024;
  int resolution = 2048;
  int n_max = 50;
  std::vector<double> window;  // x_min x_max y_min y_max
  std::vector<int> boxes = {4, 8, 16, 32, 64, 128, 256};
  bool supersample = false;
};

Window pick_window(const JuliaOpts& o, const ModelParams& params, const RadiusConfig& cfg) {
  if (o.window.empty()) {
    return default_julia_window(params, cfg);
  }
  if (o.window.size() != 4) {
    throw ConfigError("--window takes x_min x_max y_min y_max");
  }
  return {o.window[0], o.window[1], o.window[2], o.window[3]};
}

json window_json(const Window& w) {
  return {{"x_min", w.x_min}, {"x_max", w.x_max}, {"y_min", w.y_min}, {"y_max", w.y_max}};
}

void cmd_julia_render(const Session& s, const JuliaOpts& o) {
  const CalibratedConstants c = s.constants();
  const RadiusConfig cfg = s.radius(c);
  const ModelParams params(c.p, s.dynamics_l(cfg, s.rc.l));
  const Window w = pick_window(o, params, cfg);
  const GrayImage img = render(w, o.width, o.height, params, cfg, o.n_max, s.workers(), o.supersample);
  const auto path = s.out_path("julia.pgm");
  write_pgm(path.string(), img);
  s.emit({{"subcommand", "julia-render"}, {"l", params.l()}, {"window", window_json(w)},
          {"width", o.width}, {"height", o.height}, {"path", path.string()}});
}

void cmd_julia_dim(const Session& s, const JuliaOpts& o) {
  const CalibratedConstants c = s.constants();
  const RadiusConfig cfg = s.radius(c);
  const ModelParams params(c.p, s.dynamics_l(cfg, s.rc.l));
  const Window w = pick_window(o, params, cfg);
  const BoxCountReport rep =
      box_dimension(w, o.resolution, params, cfg, o.n_max, o.boxes, s.workers(), o.supersample);
  std::string csv = "scale,box_pixels,count_upper,count_lower\n";
  for (std::size_t i = 0; i < rep.scales.size(); ++i) {
    csv += num(rep.scales[i]) + "," + std::to_string(rep.box_pixels[i]) + "," + num(rep.counts_upper[i]) +
           "," + num(rep.counts_lower[i]) + "\n";
  }
  json j = {{"subcommand", "julia-dim"},
            {"dynamics", "model f_l; E_l agrees up to the factor-2 derivative bounds"},
            {"p", c.p},
            {"l", params.l()},
            {"r", cfg.r()},
            {"window", window_json(w)},
            {"resolution", o.resolution},
            {"n_max", o.n_max},
            {"fitted_dim", {{"value", rep.fitted_dim.value}, {"lo", rep.fitted_dim.lo},
                            {"hi", rep.fitted_dim.hi}, {"residual", rep.fitted_dim.residual}}},
            {"upper", {{"dimension", rep.upper.dimension}, {"residual", rep.upper.residual}}},
            {"undecided_fraction", rep.undecided_fraction},
            {"in_julia_fraction", rep.in_julia_fraction},
            {"target", 1.0 + 1.0 / (1.0 + c.p)}};
  if (rep.lower) {
    j["lower"] = {{"dimension", rep.lower->dimension}, {"residual", rep.lower->residual}};
  } else {
    j["lower"] = nullptr;
  }
  s.write_text("julia_dim.csv", csv);
  s.write_text("julia_dim.json", j.dump(2) + "\n");
  s.emit(j);
}

// verify -----------------------------------------------------------------

struct VerifyOpts {
  int samples = 50;
  int pairs = 20;
  int koebe = 1000;
  int decay_points = 12;
  std::vector<long> divergence_k = {100, 1000, 10000};
  double c_min = 1e-3;
  double quad_tol = 1e-10;
};

json check_json(const CheckResult& r) {
  json m = json::object();
  for (const auto& [k, v] : r.metrics) {
    m[k] = v;
  }
  json j = {{"name", r.name}, {"pass", r.pass}, {"samples", r.samples}, {"metrics", m}};
  if (!r.detail.empty()) {
    j["detail"] = r.detail;
  }
  return j;
}

bool cmd_verify(const Session& s, const VerifyOpts& o) {
  const CalibratedConstants c = s.constants();
  const unsigned workers = s.workers();
  std::vector<CheckResult> checks;
  ApproximationCheckOptions ao;
  ao.in_samples = o.samples;
  ao.off_samples = o.samples;
  ao.quad_tol = o.quad_tol;
  ao.seed = s.rc.seed;
  ao.workers = workers;
  checks.push_back(check_approximation(c, ao));
  OperatorCheckOptions oo;
  oo.pairs = o.pairs;
  oo.quad_tol = o.quad_tol;
  oo.seed = s.rc.seed + 1;
  oo.workers = workers;
  checks.push_back(check_operator_ratio(c, oo));
  checks.push_back(check_koebe(c, o.koebe, s.rc.seed + 2));
  checks.push_back(check_decay(c, o.decay_points, 1.5, 0.25, 1e6, 50.0, workers));
  checks.push_back(check_divergence_t1(c, o.divergence_k, o.c_min));
  bool all = true;
  json arr = json::array();
  for (const auto& r : checks) {
    all = all && r.pass;
    arr.push_back(check_json(r));
  }
  json j = {{"subcommand", "verify"}, {"seed", s.rc.seed}, {"constants", constants_json(c)},
            {"checks", arr}, {"pass", all}};
  s.write_text("verify.json", j.dump() + "\n");
  s.emit(j);
  return all;
}

std::string error_type(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) {
    return "config";
  }
  if (dynamic_cast<const NonConvergenceError*>(&e)) {
    return "non_convergence";
  }
  if (dynamic_cast<const BracketError*>(&e)) {
    return "bracket";
  }
  if (dynamic_cast<const DivergenceError*>(&e)) {
    return "divergence";
  }
  if (dynamic_cast<const ConditioningError*>(&e)) {
    return "conditioning";
  }
  if (dynamic_cast<const DomainError*>(&e)) {
    return "domain";
  }
  return "runtime";
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical experiments for the hyperbolic dimension of the maps E_l", "hypdim"};
  app.config_formatter(std::make_shared<CLI::ConfigINI>());
  app.set_config("--config", "", "INI file; [subcommand] sections hold subcommand options");
  app.fallthrough();
  app.require_subcommand(1);

  RunConfig rc;
  double l_arg = 0.0, r_arg = 0.0;
  app.add_option("--p", rc.p, "growth exponent p")->capture_default_str();
  auto* l_opt = app.add_option("--l", l_arg, "translation l (default: l_min + 1; eval: 0)");
  auto* r_opt = app.add_option("--r", r_arg, "working radius r (default: r0)");
  app.add_option("--constants", rc.constants, "calibration cache (default: bundled for p in {0.5, 1, 2})");
  app.add_option("--out", rc.out_dir, "output directory")->capture_default_str();
  app.add_option("--workers", rc.workers, "worker threads (default: HYPDIM_WORKERS or all cores)");
  app.add_option("--seed", rc.seed, "sampling seed")->capture_default_str();

  CalibrateOpts cal;
  auto* sc = app.add_subcommand("calibrate", "calibrate C, D, r0, K, Kcal and write a constants file");
  sc->add_option("--grid", cal.budget.grid, "sample grid per region")->capture_default_str();
  sc->add_option("--koebe-samples", cal.budget.koebe_samples)->capture_default_str();
  sc->add_option("--kcal-points", cal.budget.kcal_points)->capture_default_str();
  sc->add_option("--kcal-branches", cal.budget.kcal_branches)->capture_default_str();
  sc->add_option("--quad-tol", cal.budget.quad_tol)->capture_default_str();
  sc->add_option("--save", cal.save, "constants file (default: <out>/constants_p<p>.txt)");

  EvalOpts ev;
  auto* se = app.add_subcommand("eval", "phi, tau, f and E at one point (JSON)");
  se->add_option("--x", ev.x, "Re z")->capture_default_str();
  se->add_option("--y", ev.y, "Im z")->capture_default_str();
  se->add_option("--quad-tol", ev.quad_tol)->capture_default_str();

  TransferOpts tr;
  auto* st = app.add_subcommand("transfer", "L_t 1 over |w|, t and l grids (CSV)");
  st->add_option("--abs-w", tr.abs_w, "|w| values (default: 6 log-spaced in [1.5 r, 1e6])");
  st->add_option("--arg-w", tr.arg_w, "arg w")->capture_default_str();
  st->add_option("--t", tr.t, "exponents t > 1")->capture_default_str();
  st->add_option("--l-list", tr.l_list, "translations (default: --l)");
  st->add_flag("--entire", tr.entire, "also evaluate the entire-function operator");
  st->add_option("--refine-budget", tr.refine_budget)->capture_default_str();
  st->add_option("--eps-tail", tr.eps_tail, "tail tolerance (0: relative 1e-8)")->capture_default_str();
  st->add_option("--quad-tol", tr.quad_tol)->capture_default_str();

  PressureOpts pr;
  auto* sp = app.add_subcommand("pressure", "pressure estimates P(t) (CSV)");
  sp->add_option("--t", pr.t, "exponents t > 1")->capture_default_str();
  pr.grid.add(sp);

  HypdimOpts hd;
  auto* sh = app.add_subcommand("hypdim", "Bowen zero over an l sweep (CSV and trend report)");
  sh->add_option("--l-list", hd.l_list, "translations (default: l_min+1 times 10^{0, 0.5, ..., 2})");
  sh->add_option("--t-lo", hd.t_lo)->capture_default_str();
  sh->add_option("--t-hi", hd.t_hi)->capture_default_str();
  sh->add_option("--tol-t", hd.tol_t)->capture_default_str();
  sh->add_option("--tol-p", hd.tol_P)->capture_default_str();
  hd.grid.add(sh);

  JuliaOpts jr;
  auto* sjr = app.add_subcommand("julia-render", "escape-time image of the Julia set (PGM)");
  sjr->add_option("--width", jr.width)->capture_default_str();
  sjr->add_option("--height", jr.height)->capture_default_str();
  sjr->add_option("--n-max", jr.n_max)->capture_default_str();
  sjr->add_option("--window", jr.window, "x_min x_max y_min y_max (default: near part of the tract)");
  sjr->add_flag("--supersample", jr.supersample, "2x2 orbits per pixel");

  JuliaOpts jd;
  auto* sjd = app.add_subcommand("julia-dim", "box-counting dimension of the Julia set (JSON, CSV)");
  sjd->add_option("--resolution", jd.resolution)->capture_default_str();
  sjd->add_option("--n-max", jd.n_max)->capture_default_str();
  sjd->add_option("--boxes", jd.boxes, "box sizes in pixels")->capture_default_str();
  sjd->add_option("--window", jd.window, "x_min x_max y_min y_max (default: near part of the tract)");
  sjd->add_flag("--supersample", jd.supersample, "2x2 orbits per pixel");

  VerifyOpts vf;
  auto* sv = app.add_subcommand("verify", "sampled invariant suite (pass/fail JSON)");
  sv->add_option("--samples", vf.samples, "approximation samples per region")->capture_default_str();
  sv->add_option("--pairs", vf.pairs, "operator-ratio (w, t) pairs")->capture_default_str();
  sv->add_option("--koebe", vf.koebe, "Koebe distortion samples")->capture_default_str();
  sv->add_option("--decay-points", vf.decay_points)->capture_default_str();
  sv->add_option("--divergence-k", vf.divergence_k)->capture_default_str();
  sv->add_option("--c-min", vf.c_min, "minimal increment S_10K - S_K at t = 1")->capture_default_str();
  sv->add_option("--quad-tol", vf.quad_tol)->capture_default_str();

  std::vector<const char*> argv;
  argv.push_back("hypdim");
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  if (l_opt->count() > 0) {
    rc.l = l_arg;
  }
  if (r_opt->count() > 0) {
    rc.r = r_arg;
  }

  try {
    if (!(rc.p > 0.0) || !std::isfinite(rc.p)) {
      throw ConfigError("p must be positive");
    }
    if (rc.l && !(*rc.l >= 0.0)) {
      throw ConfigError("l must be non-negative");
    }
    const Session s{rc, out};
    if (*sc) {
      cmd_calibrate(s, cal);
    } else if (*se) {
      cmd_eval(s, ev);
    } else if (*st) {
      cmd_transfer(s, tr);
    } else if (*sp) {
      cmd_pressure(s, pr);
    } else if (*sh) {
      cmd_hypdim(s, hd);
    } else if (*sjr) {
      cmd_julia_render(s, jr);
    } else if (*sjd) {
      cmd_julia_dim(s, jd);
    } else if (*sv) {
      return cmd_verify(s, vf) ? 0 : 3;
    }
  } catch (const std::exception& e) {
    err << json{{"status", "error"}, {"type", error_type(e)}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}

} // namespace hypdim::cli
