#pragma once

// Subcommands of the swlab tool. Each fills a Report and gates the invariants
// it can check; run() maps exceptions to exit codes.

#include "swlab/app/report.hpp"
#include "swlab/app/samplers.hpp"
#include "swlab/functionals.hpp"
#include "swlab/harmonic.hpp"

#include <filesystem>

namespace swlab::app {

namespace commands_detail {

inline double gate_or(const ExperimentConfig& c, double fallback) { return c.gate ? *c.gate : fallback; }

/// base at 16 nodes per axis, loosened by (16/n)^order on coarser grids; --gate overrides.
inline double scaled_gate(const ExperimentConfig& c, double base, int order) {
  const int n = *std::min_element(c.dims.begin(), c.dims.end());
  return gate_or(c, base * std::pow(std::max(1.0, 16.0 / n), order));
}

template <class T>
void dump(const ExperimentConfig& c, const std::string& name, const Field<T>& f) {
  if (c.dump_dir.empty()) return;
  std::filesystem::create_directories(c.dump_dir);
  write_field(to_raw(f), (std::filesystem::path(c.dump_dir) / (name + ".swlf")).string());
}

inline double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

struct Setup {
  GridSpec grid;
  MetricPreset preset;
  MetricField metric;
};

inline Setup setup(const ExperimentConfig& c) {
  Setup s{c.grid(), parse_metric_preset(c.metric), {}};
  s.metric = build_metric_preset(s.preset, s.grid);
  return s;
}

/// Largest per-node error of R and w against the closed form of the preset.
inline std::pair<double, double> curvature_errors(const CurvatureOracle& o, const CurvatureBundle& cb) {
  const GridSpec& g = cb.R.grid();
  double er = 0.0, ew = 0.0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const Vec4 x = g.position(i);
    er = std::max(er, std::abs(cb.R[i] - o.R(x)));
    ew = std::max(ew, std::abs(cb.w[i] - o.w(x)));
  }
  return {er, ew};
}

inline Json to_json(const InequalityReport& r) {
  Json j{{"kind", r.kind},   {"lhs_formula", r.lhs_formula}, {"rhs_formula", r.rhs_formula}, {"lhs", r.lhs},
         {"rhs", r.rhs},     {"margin", r.margin},           {"mixed_sign", r.mixed_sign}};
  for (const auto& [k, v] : r.inputs) j["inputs"][k] = v;
  return j;
}

inline Json to_json(const BoundReport& b) {
  return {{"lhs", b.lhs}, {"rhs", b.rhs}, {"margin", b.margin}, {"applicable", b.applicable},
          {"gated_residual", b.gated_residual}};
}

inline Json to_json(const PswResidual& r) {
  return {{"r1_l2", r.r1_l2},
          {"r1_linf", r.r1_linf},
          {"r2_l2", r.r2_l2},
          {"r2_linf", r.r2_linf},
          {"r1_scale", r.r1_scale},
          {"r2_scale", r.r2_scale},
          {"dirac_relative", relative_dirac_residual(r)},
          {"curvature_relative", relative_curvature_residual(r)}};
}

/// Fixed positive-chirality spinor used by the gauge-trivial source, |phi0|^2 = 1.25.
inline Spinor gauge_trivial_spinor() { return Spinor(Complex(1.0, 0.0), Complex(0.0, 0.5)); }

inline ManufacturedSolution manufacture(const ExperimentConfig& c, const MetricField& m) {
  if (c.source == "connection") return manufacture_from_connection(m, random_potential(m.grid(), c.seed, c.amplitude), c.eps);
  return manufacture_gauge_trivial(m, random_gauge(m.grid(), c.seed, c.amplitude), gauge_trivial_spinor(), c.eps, 1.0);
}

}  // namespace commands_detail

// ---------------------------------------------------------------------------

/// R, w and W+ of the metric; analytic presets are gated against their closed form.
inline void run_curvature(const ExperimentConfig& c, Report& rep) {
  using namespace commands_detail;
  Stopwatch sw;
  const auto s = setup(c);
  const auto cb = curvature_stack(s.metric);
  rep.timing("curvature_stack", sw.seconds());
  auto& r = rep.results();
  r["volume"] = volume(s.metric.vol());
  r["R"] = summary(cb.R, s.metric.vol());
  r["w"] = summary(cb.w, s.metric.vol());
  double trace = 0.0, wplus = 0.0;
  for (std::size_t i = 0; i < cb.Wplus.size(); ++i) {
    trace = std::max(trace, std::abs(cb.Wplus[i].trace()));
    wplus = std::max(wplus, cb.Wplus[i].norm());
  }
  r["wplus_max_norm"] = wplus;
  r["wplus_max_trace"] = trace;
  rep.gate("wplus_trace_free", trace, 1e-8 * (1.0 + wplus));
  rep.gate("w_nonpositive", r["w"]["max"].get<double>(), 1e-8 * (1.0 + wplus));
  if (const auto o = curvature_oracle(s.preset)) {
    const auto [er, ew] = curvature_errors(o, cb);
    r["closed_form"] = {{"R_max_error", er}, {"w_max_error", ew}};
    const double g = scaled_gate(c, 1e-4, 6);
    rep.gate("R_closed_form", er, g);
    rep.gate("w_closed_form", ew, g);
  }
  dump(c, "R", cb.R);
  dump(c, "w", cb.w);
  dump(c, "wplus", cb.Wplus);
}

/// Weitzenboeck residual, the two integral identities, their combined inequality and the Kato
/// inequality on seeded random forms; optionally the harmonic self-dual basis.
inline void run_hodge(const ExperimentConfig& c, Report& rep) {
  using namespace commands_detail;
  const auto s = setup(c);
  const auto cb = curvature_stack(s.metric);
  const auto th = build_theta_preset(parse_theta_preset(c.theta), s.metric);
  const double g = scaled_gate(c, 1e-3, 4);
  Json rows = Json::array();
  double worst_w = 0.0, worst_id = 0.0, worst_ineq = std::numeric_limits<double>::infinity();
  double worst_kato = std::numeric_limits<double>::infinity();
  Stopwatch sw;
  for (int k = 0; k < c.samples; ++k) {
    const auto sig = random_selfdual(s.grid, c.seed + std::uint64_t(k));
    const double wr = weitzenboeck_residual(sig, s.metric, cb);
    const auto is = integral_identity_check_s(sig, th, s.metric, cb);
    const auto ic = integral_identity_check_c(sig, th, s.metric);
    const auto in = inequality_check_s_and_c(sig, th, s.metric, cb);
    const double in_rel = in.margin / (std::abs(in.lhs) + std::abs(in.rhs));
    // Kato runs on a form without zeros: |sigma| is not smooth at zeros, which the stencil would see.
    const auto ksig = random_selfdual_nonvanishing(s.grid, c.seed + std::uint64_t(k));
    const double nab = std::sqrt(max_abs(pointwise_norm2(covariant_derivative(ksig, s.metric))));
    const auto kato = kato_check(ksig, s.metric, 0.0);
    const double kato_rel = kato.margin / (1.0 + nab);
    rows.push_back({{"seed", c.seed + std::uint64_t(k)},
                    {"weitzenboeck_residual", wr},
                    {"identity_s", {{"lhs", is.lhs}, {"rhs", is.rhs}, {"relative", is.relative}}},
                    {"identity_c", {{"lhs", ic.lhs}, {"rhs", ic.rhs}, {"relative", ic.relative}}},
                    {"inequality_s_and_c", {{"lhs", in.lhs}, {"rhs", in.rhs}, {"relative_margin", in_rel}}},
                    {"kato", {{"margin", kato.margin}, {"relative_margin", kato_rel}, {"nodes", kato.nodes_checked}}}});
    worst_w = std::max(worst_w, wr);
    worst_id = std::max({worst_id, is.relative, ic.relative});
    worst_ineq = std::min(worst_ineq, in_rel);
    worst_kato = std::min(worst_kato, kato_rel);
  }
  rep.timing("checks", sw.seconds());
  rep.results()["samples"] = rows;
  rep.gate("weitzenboeck_residual", worst_w, g);
  rep.gate("integral_identities", worst_id, g);
  rep.gate("inequality_s_and_c", worst_ineq, -g, false);
  rep.gate("kato", worst_kato, -g, false);
  if (c.harmonic) {
    Stopwatch hw;
    const auto basis = harmonic_selfdual_basis(s.metric);
    rep.timing("harmonic", hw.seconds());
    rep.results()["harmonic"] = {{"count", basis.forms.size()},
                                 {"quotients", basis.quotients},
                                 {"ritz_values", basis.ritz_values},
                                 {"count_tol", basis.count_tol},
                                 {"iterations", basis.iterations}};
    for (std::size_t i = 0; i < basis.forms.size(); ++i) dump(c, "harmonic_" + std::to_string(i), basis.forms[i]);
  }
}

/// Dirac Weitzenboeck identity and log Kato inequality on seeded (Phi, a) pairs; flat charts only.
inline void run_dirac_check(const ExperimentConfig& c, Report& rep) {
  using namespace commands_detail;
  const auto s = setup(c);
  const double g = scaled_gate(c, 1e-3, 4);
  Json rows = Json::array();
  double worst = 0.0, worst_kato = std::numeric_limits<double>::infinity();
  for (int k = 0; k < c.samples; ++k) {
    const std::uint64_t seed = c.seed + std::uint64_t(k);
    const auto phi = random_spinor(s.grid, seed);
    const auto A = make_connection(random_potential(s.grid, seed + 1000, c.amplitude), s.metric);
    const auto w = dirac_weitzenboeck_check(phi, A, s.metric);
    const auto kato = log_kato_check(phi, A, s.metric, 0.1);
    rows.push_back({{"seed", seed},
                    {"weitzenboeck", {{"lhs", w.lhs}, {"rhs", w.rhs}, {"residual", w.residual}}},
                    {"log_kato", {{"margin", kato.margin}, {"nodes", kato.nodes_checked}}}});
    worst = std::max(worst, w.residual);
    worst_kato = std::min(worst_kato, kato.margin);
  }
  rep.results()["samples"] = rows;
  rep.gate("dirac_weitzenboeck_residual", worst, g);
  rep.gate("log_kato_margin", worst_kato, -g, false);
}

/// lambda_theta by multistart minimization, with K_theta from the computed value.
inline void run_lambda(const ExperimentConfig& c, Report& rep) {
  using namespace commands_detail;
  const auto s = setup(c);
  const auto th = build_theta_preset(parse_theta_preset(c.theta), s.metric);
  LambdaOptions o;
  o.random_starts = c.starts;
  o.max_iterations = c.max_iterations;
  o.tolerance = c.tolerance;
  o.seed = c.seed;
  Stopwatch sw;
  const auto res = minimize_lambda(th, s.metric, o);
  rep.timing("minimize_lambda", sw.seconds());
  const auto cb = curvature_stack(s.metric);
  const auto K = assemble_K(th, cb, res.lambda);
  const double straight = rayleigh_quotient(res.minimizer, th, s.metric, 0.0);
  const auto [lo, hi] = std::minmax_element(res.start_values.begin(), res.start_values.end());
  auto& r = rep.results();
  r["lambda"] = res.lambda;
  r["start_values"] = res.start_values;
  r["start_spread"] = *hi - *lo;
  r["iterations"] = res.iterations;
  r["converged"] = res.converged;
  r["epsilon_final"] = res.epsilon_final;
  r["quotient_history_length"] = res.quotient_history.size();
  r["straight_line_quotient"] = straight;
  r["almost_kaehler_detected"] = res.lambda <= 1e-6;
  r["K"] = summary(K.K, s.metric.vol());
  r["K_minus_max"] = max_abs(K.Kminus);
  rep.gate("lambda_nonnegative", res.lambda, 0.0, false);
  rep.gate("quotient_routes_agree", std::abs(straight - res.lambda), 1e-9 * std::max(1.0, res.lambda));
  if (c.gate) rep.gate("lambda_upper", res.lambda, *c.gate);
  dump(c, "minimizer", res.minimizer);
  dump(c, "K", K.K);
}

/// Residuals of the perturbed equations on a manufactured configuration.
inline void run_psw_residual(const ExperimentConfig& c, Report& rep) {
  using namespace commands_detail;
  const auto s = setup(c);
  const auto sol = manufacture(c, s.metric);
  auto& r = rep.results();
  r["variant"] = c.variant;
  r["source"] = c.source;
  const double g = gate_or(c, 1e-10);
  if (c.variant == "simple") {
    const auto cb = curvature_stack(s.metric);
    const auto res = psw_residual(sol.cfg, s.metric, PerturbationSpec::simple(c.eps), simple_K(cb));
    r["residual"] = to_json(res);
    dump(c, "r1", res.r1);
    dump(c, "r2", res.r2);
    return;
  }
  const auto full = psw_residual(sol.cfg, s.metric, sol.pert, sol.K);
  r["residual"] = to_json(full);
  rep.gate("curvature_equation", relative_curvature_residual(full), g);
  if (c.variant == "general") {
    const auto gen = general_from_full(sol.pert, sol.K);
    const auto adm = check_admissibility(gen, sol.K);
    r["admissibility"] = {{"admissible", adm.admissible}, {"violations", adm.violations},
                          {"violation_count", adm.violation_count}};
    if (!adm.admissible) {
      rep.gate("admissible", double(adm.violation_count), 0.0);
      return;
    }
    const auto gres = general_psw_residual(sol.cfg, s.metric, gen, sol.K);
    double diff = 0.0;
    for (std::size_t i = 0; i < gres.r2.size(); ++i) diff = std::max(diff, (gres.r2[i] - full.r2[i]).cwiseAbs().maxCoeff());
    r["general_residual"] = to_json(gres);
    r["reduction_max_difference"] = diff;
    rep.gate("reduction_identity", diff, 1e-14 * (1.0 + full.r2_scale));
    dump(c, "r2_general", gres.r2);
  }
  dump(c, "r1", full.r1);
  dump(c, "r2", full.r2);
}

/// L-infinity curvature bound, L4 spinor bound and the curvature energy chain.
inline void run_bounds(const ExperimentConfig& c, Report& rep) {
  using namespace commands_detail;
  const auto s = setup(c);
  const auto sol = manufacture(c, s.metric);
  const double g = gate_or(c, 1e-6);
  const auto cbound = check_curvature_bound(sol.cfg, s.metric, sol.pert, sol.K, g);
  const auto lbound = check_phi_l4_bound(sol.cfg, s.metric, sol.pert, sol.K, g);
  const double vol = volume(s.metric.vol());
  auto& r = rep.results();
  r["source"] = c.source;
  r["curvature_bound"] = to_json(cbound);
  r["phi_l4_bound"] = to_json(lbound);
  if (cbound.applicable) rep.gate("curvature_bound", cbound.margin, -1e-6, false);
  if (lbound.applicable) rep.gate("phi_l4_bound", lbound.margin, -1e-6 * vol, false);
  if (!sol.pert.omega_hat) {
    const auto chain = curvature_energy_chain(sol.cfg, s.metric, sol.pert, sol.K);
    r["energy_chain"] = {{"lhs", chain.lhs}, {"rhs", chain.rhs}, {"margin", chain.margin}};
    if (cbound.applicable) rep.gate("energy_chain", chain.margin, -1e-6 * (1.0 + std::abs(chain.rhs)), false);
  }
}

namespace commands_detail {

inline std::vector<double> deltas(const ExperimentConfig& c) {
  if (c.delta_sweep.empty()) return {c.delta};
  const auto parts = config_detail::split(c.delta_sweep, ':');
  if (parts.size() != 3) throw UsageError("delta-sweep: expected lo:hi:n");
  const double lo = config_detail::parse_constant("delta-sweep", parts[0]);
  const double hi = config_detail::parse_constant("delta-sweep", parts[1]);
  const int n = config_detail::parse_int("delta-sweep", parts[2]);
  if (n < 2) throw UsageError("delta-sweep: n must be at least 2");
  std::vector<double> d(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) d[std::size_t(i)] = lo + (hi - lo) * i / (n - 1);
  return d;
}

inline CatalogEntry catalog_entry(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const auto args = colon == std::string::npos ? std::vector<std::string>{} : config_detail::split(text.substr(colon + 1), ',');
  if (kind == "torus-surface" && (args.size() == 1 || args.size() == 2)) {
    const int genus = config_detail::parse_int("catalog", args[0]);
    const double area = args.size() == 2 ? config_detail::parse_constant("catalog", args[1]) : 4 * kPi * kPi;
    return catalog_torus_times_surface(genus, area);
  }
  if (kind == "surface-product" && args.size() == 2) {
    return catalog_surface_product(config_detail::parse_int("catalog", args[0]),
                                   config_detail::parse_int("catalog", args[1]));
  }
  throw UsageError("catalog: '" + text + "' is not torus-surface:G[,AREA] or surface-product:G,H");
}

/// Flat charts carry the constant eta basis, which is exactly harmonic; other metrics use the solver.
inline std::vector<SelfDualField> harmonic_basis(const MetricField& m) {
  if (m.is_flat()) {
    const double n = 1.0 / std::sqrt(volume(m.vol()));
    return {SelfDualField(m.grid(), Vec3(n, 0, 0)), SelfDualField(m.grid(), Vec3(0, n, 0)),
            SelfDualField(m.grid(), Vec3(0, 0, n))};
  }
  return harmonic_selfdual_basis(m).forms;
}

}  // namespace commands_detail

/// Linear and quadratic curvature reports, on the grid or for the closed-form catalog.
inline void run_lebrun(const ExperimentConfig& c, Report& rep) {
  using namespace commands_detail;
  auto& r = rep.results();
  const auto ds = deltas(c);
  if (c.mode == "catalog") {
    const auto e = catalog_entry(c.catalog);
    r["entry"] = {{"name", e.name}, {"K1", e.K1}, {"K2", e.K2}, {"A1", e.A1}, {"A2", e.A2},
                  {"chi1", e.chi1}, {"chi2", e.chi2}, {"c1_pairing", e.c1_pairing()}, {"c1plus_sq", e.c1plus_sq()}};
    Json rows = Json::array();
    std::ostringstream csv;
    csv << std::setprecision(17) << "delta,linear_lhs,linear_rhs,linear_margin,quadratic_lhs,quadratic_rhs,quadratic_margin\n";
    for (double d : ds) {
      const auto lin = catalog_linear(e, d);
      const auto quad = catalog_quadratic(e, d);
      rows.push_back({{"delta", d}, {"linear", to_json(lin)}, {"quadratic", to_json(quad)}});
      csv << d << ',' << lin.lhs << ',' << lin.rhs << ',' << lin.margin << ',' << quad.lhs << ',' << quad.rhs << ','
          << quad.margin << '\n';
    }
    r["rows"] = rows;
    if (!c.csv.empty()) {
      std::ofstream os(c.csv);
      if (!os) throw UsageError("cannot open " + c.csv + " for writing");
      os << csv.str();
    }
    return;
  }
  const auto s = setup(c);
  const auto cb = curvature_stack(s.metric);
  const auto F = parse_flux(c.flux, s.grid);
  Stopwatch hw;
  const auto basis = harmonic_basis(s.metric);
  rep.timing("harmonic", hw.seconds());
  if (std::size_t(c.omega_index) >= basis.size()) {
    throw UsageError("omega-index: only " + std::to_string(basis.size()) + " harmonic forms were found");
  }
  const auto& omega = basis[std::size_t(c.omega_index)];
  const double c1plus = c1plus_squared(F, basis, s.metric);
  r["harmonic_count"] = basis.size();
  r["c1_pairing"] = chern_pairing(F, omega, s.metric);
  r["c1plus_sq"] = c1plus;
  Json rows = Json::array();
  for (double d : ds) {
    const auto K = lebrun_delta_K(cb, d);
    const KField kf{K, map(K, positive_part), map(K, negative_part)};
    const auto lin = lebrun_linear(omega, s.metric, K, r["c1_pairing"].get<double>());
    const auto quad = lebrun_quadratic(kf, s.metric, c1plus);
    rows.push_back({{"delta", d}, {"linear", to_json(lin)}, {"quadratic", to_json(quad)}});
    if (c1plus <= 1e-14) rep.gate("quadratic_margin_delta_" + std::to_string(d), quad.margin, 0.0, false);
    if (c.gate) rep.gate("linear_margin_delta_" + std::to_string(d), lin.margin, -*c.gate, false);
  }
  r["rows"] = rows;
}

namespace commands_detail {

inline double sweep_residual(const ExperimentConfig& c, int n) {
  ExperimentConfig sized = c;
  sized.dims = {n, n, n, n};
  const auto s = setup(sized);
  if (c.check == "curvature") {
    const auto o = curvature_oracle(s.preset);
    if (!o) throw UsageError("sweep: the curvature check needs an analytic metric preset");
    const auto [er, ew] = curvature_errors(o, curvature_stack(s.metric));
    return std::max(er, ew);
  }
  if (c.check == "dirac") {
    const auto phi = random_spinor(s.grid, c.seed);
    const auto A = make_connection(random_potential(s.grid, c.seed + 1000, c.amplitude), s.metric);
    return dirac_weitzenboeck_check(phi, A, s.metric).residual;
  }
  const auto cb = curvature_stack(s.metric);
  if (c.check == "constant") {
    if (s.preset.kind != MetricPreset::Kind::flat) throw UsageError("sweep check 'constant' needs --metric flat");
    return weitzenboeck_residual(SelfDualField(s.grid, Vec3(1.0, -0.5, 0.25)), s.metric, cb);
  }
  const auto sig = random_selfdual(s.grid, c.seed);
  if (c.check == "weitzenboeck") return weitzenboeck_residual(sig, s.metric, cb);
  const auto th = build_theta_preset(parse_theta_preset(c.theta), s.metric);
  if (c.check == "identity-s") return integral_identity_check_s(sig, th, s.metric, cb).relative;
  return integral_identity_check_c(sig, th, s.metric).relative;
}

}  // namespace commands_detail

/// Runs one check across grid sizes and reports observed orders log(r_i / r_{i+1}) / log(n_{i+1} / n_i).
inline void run_sweep(const ExperimentConfig& c, Report& rep) {
  using namespace commands_detail;
  std::vector<double> res;
  for (int n : c.sizes) {
    Stopwatch sw;
    res.push_back(sweep_residual(c, n));
    rep.timing("size_" + std::to_string(n), sw.seconds());
  }
  Json rows = Json::array();
  std::ostringstream csv;
  csv << std::setprecision(17) << "size,residual,order\n";
  double worst_order = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < res.size(); ++i) {
    Json row{{"size", c.sizes[i]}, {"residual", res[i]}, {"order", nullptr}};
    csv << c.sizes[i] << ',' << res[i] << ',';
    // Orders are undefined once both residuals sit at rounding level.
    if (i > 0 && res[i - 1] > 1e-13 && res[i] > 0.0) {
      const double order = std::log(res[i - 1] / res[i]) / std::log(double(c.sizes[i]) / c.sizes[i - 1]);
      row["order"] = order;
      csv << order;
      worst_order = std::min(worst_order, order);
    }
    csv << '\n';
    rows.push_back(row);
  }
  rep.results()["check"] = c.check;
  rep.results()["rows"] = rows;
  if (c.check == "constant") {
    rep.gate("constant_residual", *std::max_element(res.begin(), res.end()), gate_or(c, 1e-10));
  } else if (c.min_order) {
    rep.gate("observed_order", worst_order, *c.min_order, false);
  }
  if (!c.csv.empty()) {
    std::ofstream os(c.csv);
    if (!os) throw UsageError("cannot open " + c.csv + " for writing");
    os << csv.str();
  }
}

// ---------------------------------------------------------------------------

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"curvature", "hodge", "dirac-check", "lambda",
                                                 "psw-residual", "bounds", "lebrun", "sweep"};
  return names;
}

struct RunOutcome {
  Json report;        ///< null when the run failed before producing a report
  int exit_code = kSuccess;
  std::string error;  ///< message for non-zero exits without a report
};

inline RunOutcome run(const ExperimentConfig& c) {
  RunOutcome out;
  try {
    validate(c);
    Report rep(c);
    Stopwatch sw;
    if (c.command == "curvature") run_curvature(c, rep);
    else if (c.command == "hodge") run_hodge(c, rep);
    else if (c.command == "dirac-check") run_dirac_check(c, rep);
    else if (c.command == "lambda") run_lambda(c, rep);
    else if (c.command == "psw-residual") run_psw_residual(c, rep);
    else if (c.command == "bounds") run_bounds(c, rep);
    else if (c.command == "lebrun") run_lebrun(c, rep);
    else if (c.command == "sweep") run_sweep(c, rep);
    else throw UsageError("unknown command '" + c.command + "'");
    rep.timing("total", sw.seconds());
    out.report = rep.to_json();
    out.exit_code = rep.passed() ? kSuccess : kGateFailure;
  } catch (const AdmissibilityError& e) {
    out.exit_code = kGateFailure;
    out.error = e.what();
  } catch (const NumericalError& e) {
    out.exit_code = kNumericalError;
    out.error = e.what();
  } catch (const Error& e) {
    // InvalidArgument, ParseError, UsageError and UnsupportedConfiguration.
    out.exit_code = kUsageError;
    out.error = e.what();
  } catch (const std::exception& e) {
    out.exit_code = kNumericalError;
    out.error = e.what();
  }
  return out;
}

}  // namespace swlab::app
