#pragma once

// Experiment configuration: defaults, JSON round trip, presets for the metric
// and theta, and the closed-form curvature of the analytic metric presets.

#include "swlab/app/expr.hpp"
#include "swlab/app/field_io.hpp"
#include "swlab/curvature.hpp"
#include "swlab/theta.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace swlab::app {

using Json = nlohmann::json;

/// Bad command line or configuration; the tool exits with status 2.
class UsageError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct ExperimentConfig {
  std::string command;
  std::array<int, 4> dims = {12, 12, 12, 12};
  std::array<double, 4> periods = {2 * kPi, 2 * kPi, 2 * kPi, 2 * kPi};
  std::string metric = "flat";
  std::string theta = "const:0";
  std::uint64_t seed = 1;
  int samples = 5;                 ///< random configurations per check
  std::optional<double> gate;      ///< command-specific default when absent
  // Perturbed equations.
  std::string variant = "full";    ///< simple | full | general
  std::string source = "connection";  ///< connection | gauge-trivial
  double eps = 0.1;
  double amplitude = 0.1;
  // Lambda minimizer.
  int starts = 4;
  int max_iterations = 200;
  double tolerance = 1e-6;
  // LeBrun reports.
  std::string mode = "grid";       ///< grid | catalog
  double delta = 0.0;
  std::string delta_sweep;         ///< "lo:hi:n", empty for a single delta
  std::string catalog = "torus-surface:2";
  std::string flux;                ///< "ij:n,..." constant integral flux, empty for none
  int omega_index = 0;
  bool harmonic = false;           ///< hodge: also compute the harmonic basis
  // Refinement sweep.
  std::vector<int> sizes = {8, 16};
  std::string check = "weitzenboeck";
  std::optional<double> min_order;
  // Output; not part of the digest.
  std::string out;
  std::string dump_dir;
  std::string csv;
  bool timings = false;

  GridSpec grid() const { return GridSpec(dims, periods); }
};

namespace config_detail {

inline double parse_constant(const std::string& key, const std::string& text) {
  try {
    return Expr::parse(text)->value(Vec4::Zero());
  } catch (const ParseError& e) {
    throw UsageError(key + ": " + e.what());
  }
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline int parse_int(const std::string& key, const std::string& s) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw UsageError(key + ": '" + s + "' is not an integer");
  return v;
}

template <class T>
T get_as(const Json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const Json::exception&) {
    throw UsageError("key '" + key + "': unexpected value " + j.dump());
  }
}

inline std::array<int, 4> parse_dims(const std::string& key, const Json& j) {
  std::vector<int> v;
  if (j.is_number_integer()) {
    v = {j.get<int>()};
  } else if (j.is_string()) {
    for (const auto& t : split(j.get<std::string>(), ',')) v.push_back(parse_int(key, t));
  } else {
    v = get_as<std::vector<int>>(j, key);
  }
  if (v.size() == 1) v.assign(4, v[0]);
  if (v.size() != 4) throw UsageError(key + ": give one size or four");
  for (int d : v) {
    if (d < GridSpec::kMinDims) throw UsageError(key + ": every size must be at least 4");
  }
  return {v[0], v[1], v[2], v[3]};
}

inline std::array<double, 4> parse_periods(const std::string& key, const Json& j) {
  std::vector<double> v;
  if (j.is_number()) {
    v = {j.get<double>()};
  } else if (j.is_string()) {
    for (const auto& t : split(j.get<std::string>(), ',')) v.push_back(parse_constant(key, t));
  } else if (j.is_array()) {
    for (const auto& e : j) v.push_back(e.is_string() ? parse_constant(key, e.get<std::string>()) : get_as<double>(e, key));
  } else {
    throw UsageError(key + ": expected a number, a string or a list");
  }
  if (v.size() == 1) v.assign(4, v[0]);
  if (v.size() != 4) throw UsageError(key + ": give one period or four");
  for (double p : v) {
    if (!(p > 0.0) || !std::isfinite(p)) throw UsageError(key + ": periods must be positive");
  }
  return {v[0], v[1], v[2], v[3]};
}

inline std::vector<int> parse_sizes(const std::string& key, const Json& j) {
  std::vector<int> v;
  if (j.is_string()) {
    for (const auto& t : split(j.get<std::string>(), ',')) v.push_back(parse_int(key, t));
  } else {
    v = get_as<std::vector<int>>(j, key);
  }
  if (v.size() < 2) throw UsageError(key + ": a sweep needs at least two sizes");
  for (int d : v) {
    if (d < GridSpec::kMinDims) throw UsageError(key + ": every size must be at least 4");
  }
  return v;
}

inline std::string one_of(const std::string& key, const std::string& v, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (v == a) return v;
  }
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
  throw UsageError(key + ": '" + v + "' is not one of " + list);
}

inline std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace config_detail

/// Overwrites the fields named in j. Keys use the long flag names.
inline void apply_json(ExperimentConfig& c, const Json& j) {
  using namespace config_detail;
  if (!j.is_object()) throw UsageError("configuration must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "command") c.command = get_as<std::string>(v, key);
    else if (key == "dims") c.dims = parse_dims(key, v);
    else if (key == "periods") c.periods = parse_periods(key, v);
    else if (key == "metric") c.metric = get_as<std::string>(v, key);
    else if (key == "theta") c.theta = get_as<std::string>(v, key);
    else if (key == "seed") c.seed = get_as<std::uint64_t>(v, key);
    else if (key == "samples") c.samples = get_as<int>(v, key);
    else if (key == "gate") c.gate = v.is_null() ? std::nullopt : std::optional<double>(get_as<double>(v, key));
    else if (key == "variant") c.variant = one_of(key, get_as<std::string>(v, key), {"simple", "full", "general"});
    else if (key == "source") c.source = one_of(key, get_as<std::string>(v, key), {"connection", "gauge-trivial"});
    else if (key == "eps") c.eps = get_as<double>(v, key);
    else if (key == "amplitude") c.amplitude = get_as<double>(v, key);
    else if (key == "starts") c.starts = get_as<int>(v, key);
    else if (key == "max-iterations") c.max_iterations = get_as<int>(v, key);
    else if (key == "tolerance") c.tolerance = get_as<double>(v, key);
    else if (key == "mode") c.mode = one_of(key, get_as<std::string>(v, key), {"grid", "catalog"});
    else if (key == "delta") c.delta = get_as<double>(v, key);
    else if (key == "delta-sweep") c.delta_sweep = get_as<std::string>(v, key);
    else if (key == "catalog") c.catalog = get_as<std::string>(v, key);
    else if (key == "flux") c.flux = get_as<std::string>(v, key);
    else if (key == "omega-index") c.omega_index = get_as<int>(v, key);
    else if (key == "harmonic") c.harmonic = get_as<bool>(v, key);
    else if (key == "sizes") c.sizes = parse_sizes(key, v);
    else if (key == "check") {
      c.check = one_of(key, get_as<std::string>(v, key),
                       {"weitzenboeck", "identity-s", "identity-c", "dirac", "curvature", "constant"});
    } else if (key == "min-order") c.min_order = v.is_null() ? std::nullopt : std::optional<double>(get_as<double>(v, key));
    else if (key == "out") c.out = get_as<std::string>(v, key);
    else if (key == "dump-dir") c.dump_dir = get_as<std::string>(v, key);
    else if (key == "csv") c.csv = get_as<std::string>(v, key);
    else if (key == "timings") c.timings = get_as<bool>(v, key);
    else throw UsageError("unknown configuration key '" + key + "'");
  }
}

/// Parses a JSON configuration file; syntax errors carry line:column.
inline Json load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot open configuration file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  const std::string text = ss.str();
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto [line, col] = config_detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string msg = e.what();
    const auto pos = msg.find("syntax error");
    throw UsageError(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " +
                     (pos == std::string::npos ? msg : msg.substr(pos)));
  }
}

/// Every field that can change a result; output paths and timing switches are excluded.
inline Json canonical_json(const ExperimentConfig& c) {
  Json j;
  j["command"] = c.command;
  j["dims"] = c.dims;
  j["periods"] = c.periods;
  j["metric"] = c.metric;
  j["theta"] = c.theta;
  j["seed"] = c.seed;
  j["samples"] = c.samples;
  j["gate"] = c.gate ? Json(*c.gate) : Json(nullptr);
  j["variant"] = c.variant;
  j["source"] = c.source;
  j["eps"] = c.eps;
  j["amplitude"] = c.amplitude;
  j["starts"] = c.starts;
  j["max-iterations"] = c.max_iterations;
  j["tolerance"] = c.tolerance;
  j["mode"] = c.mode;
  j["delta"] = c.delta;
  j["delta-sweep"] = c.delta_sweep;
  j["catalog"] = c.catalog;
  j["flux"] = c.flux;
  j["omega-index"] = c.omega_index;
  j["harmonic"] = c.harmonic;
  j["sizes"] = c.sizes;
  j["check"] = c.check;
  j["min-order"] = c.min_order ? Json(*c.min_order) : Json(nullptr);
  return j;
}

/// FNV-1a over the canonical dump, as 16 hex digits.
inline std::string config_digest(const ExperimentConfig& c) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : canonical_json(c).dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

// ---------------------------------------------------------------------------
// Presets.

struct MetricPreset {
  enum class Kind { flat, conformal, kaehler_product, file } kind = Kind::flat;
  ExprPtr expr;      ///< f for conformal, u for kaehler-product
  std::string path;  ///< file
  int offset = 0;    ///< length of the "kind:" prefix, for error columns
};

namespace config_detail {

inline ExprPtr parse_in(const std::string& key, const std::string& prefix, const std::string& body) {
  try {
    return Expr::parse(body);
  } catch (const ParseError& e) {
    throw UsageError(key + ": parse error at column " + std::to_string(int(prefix.size()) + e.column()) + ": " +
                     std::string(e.what()).substr(std::string(e.what()).find(": ") + 2));
  }
}

inline bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

/// Periodicity check with error columns counted from the start of the preset string.
inline void require_periodic(const std::string& key, const Expr& e, int offset, const GridSpec& g) {
  try {
    e.require_periodic(g);
  } catch (const ParseError& err) {
    const std::string what = err.what();
    throw UsageError(key + ": parse error at column " + std::to_string(offset + err.column()) + ": " +
                     what.substr(what.find(": ") + 2));
  }
}

}  // namespace config_detail

inline MetricPreset parse_metric_preset(const std::string& text) {
  using namespace config_detail;
  MetricPreset p;
  if (text == "flat") return p;
  if (starts_with(text, "conformal:")) {
    p.kind = MetricPreset::Kind::conformal;
    p.expr = parse_in("metric", "conformal:", text.substr(10));
    p.offset = 10;
  } else if (starts_with(text, "kaehler-product:")) {
    p.kind = MetricPreset::Kind::kaehler_product;
    p.expr = parse_in("metric", "kaehler-product:", text.substr(16));
    p.offset = 16;
  } else if (starts_with(text, "file:")) {
    p.kind = MetricPreset::Kind::file;
    p.path = text.substr(5);
    if (p.path.empty()) throw UsageError("metric: file: needs a path");
  } else {
    throw UsageError("metric: '" + text + "' is not flat, conformal:EXPR, kaehler-product:EXPR or file:PATH");
  }
  return p;
}

inline MetricField build_metric_preset(const MetricPreset& p, const GridSpec& g) {
  switch (p.kind) {
    case MetricPreset::Kind::flat: return flat_metric(g);
    case MetricPreset::Kind::conformal:
      config_detail::require_periodic("metric", *p.expr, p.offset, g);
      return conformal_metric(p.expr->sample(g));
    case MetricPreset::Kind::kaehler_product:
      config_detail::require_periodic("metric", *p.expr, p.offset, g);
      if (!p.expr->independent_of(0) || !p.expr->independent_of(1)) {
        throw UsageError("metric: the kaehler-product function may depend on x2 and x3 only");
      }
      return kaehler_product_metric(p.expr->sample(g));
    case MetricPreset::Kind::file: {
      const auto raw = read_field(p.path);
      if (raw.grid != g) throw UsageError("metric: " + p.path + " is on a " + raw.grid.describe() + " grid, expected " + g.describe());
      return build_metric(from_raw<Mat4>(raw));
    }
  }
  throw UsageError("metric: unknown preset");
}

/// Closed-form R and w of the analytic presets; empty for metric files.
struct CurvatureOracle {
  std::function<double(const Vec4&)> R, w;
  explicit operator bool() const { return bool(R); }
};

inline CurvatureOracle curvature_oracle(const MetricPreset& p) {
  switch (p.kind) {
    case MetricPreset::Kind::flat:
      return {[](const Vec4&) { return 0.0; }, [](const Vec4&) { return 0.0; }};
    case MetricPreset::Kind::conformal: {
      // e^{2f} delta is conformally flat: W+ = 0 and R = -6 e^{-2f} (lap f + |grad f|^2).
      auto f = p.expr;
      return {[f](const Vec4& x) {
                const Jet j = f->jet(x);
                return -6.0 * std::exp(-2.0 * j.v) * (j.h.trace() + j.g.squaredNorm());
              },
              [](const Vec4&) { return 0.0; }};
    }
    case MetricPreset::Kind::kaehler_product: {
      // R = 2K with K = -e^{-2u} (u_22 + u_33); a Kaehler W+ has eigenvalues R/6, -R/12, -R/12.
      auto u = p.expr;
      auto R = [u](const Vec4& x) {
        const Jet j = u->jet(x);
        return -2.0 * std::exp(-2.0 * j.v) * (j.h(2, 2) + j.h(3, 3));
      };
      return {R, [R](const Vec4& x) {
                const double r = R(x);
                return std::min(r / 6.0, -r / 12.0);
              }};
    }
    case MetricPreset::Kind::file: return {};
  }
  return {};
}

struct ThetaPreset {
  enum class Kind { constant, coordinate, expression, file } kind = Kind::constant;
  double value = 0.0;
  int axis = 0;
  ExprPtr expr;
  std::string path;
};

inline ThetaPreset parse_theta_preset(const std::string& text) {
  using namespace config_detail;
  ThetaPreset p;
  if (starts_with(text, "const:")) {
    p.value = parse_constant("theta", text.substr(6));
  } else if (starts_with(text, "coord:")) {
    p.kind = ThetaPreset::Kind::coordinate;
    const std::string a = text.substr(6);
    if (a.size() == 1 && a[0] >= '0' && a[0] <= '3') p.axis = a[0] - '0';
    else if (a.size() == 2 && a[0] == 'x' && a[1] >= '0' && a[1] <= '3') p.axis = a[1] - '0';
    else throw UsageError("theta: coord: needs an axis 0..3");
  } else if (starts_with(text, "expr:")) {
    p.kind = ThetaPreset::Kind::expression;
    p.expr = parse_in("theta", "expr:", text.substr(5));
  } else if (starts_with(text, "file:")) {
    p.kind = ThetaPreset::Kind::file;
    p.path = text.substr(5);
    if (p.path.empty()) throw UsageError("theta: file: needs a path");
  } else {
    throw UsageError("theta: '" + text + "' is not const:V, coord:AXIS, expr:EXPR or file:PATH");
  }
  return p;
}

/// coord:k winds once around axis k: theta = 2 pi x_k / L_k.
inline ThetaField build_theta_preset(const ThetaPreset& p, const MetricField& m) {
  const GridSpec& g = m.grid();
  switch (p.kind) {
    case ThetaPreset::Kind::constant: return constant_theta(p.value, m);
    case ThetaPreset::Kind::coordinate: {
      const int k = p.axis;
      return theta_from_angle(generate(g, [&](const Vec4& x) { return 2 * kPi * x(k) / g.period(k); }), m);
    }
    case ThetaPreset::Kind::expression:
      config_detail::require_periodic("theta", *p.expr, 5, g);
      return theta_from_angle(p.expr->sample(g), m);
    case ThetaPreset::Kind::file: {
      const auto raw = read_field(p.path);
      if (raw.grid != g) throw UsageError("theta: " + p.path + " is on a " + raw.grid.describe() + " grid, expected " + g.describe());
      return theta_from_angle(from_raw<double>(raw), m);
    }
  }
  throw UsageError("theta: unknown preset");
}

/// "ij:n,..." to the constant closed form sum 2 pi n / (L_i L_j) dx^i ^ dx^j.
inline TwoFormField parse_flux(const std::string& text, const GridSpec& g) {
  Vec6 f = Vec6::Zero();
  if (!text.empty()) {
    for (const auto& item : config_detail::split(text, ',')) {
      const auto colon = item.find(':');
      if (colon != 2 || item[0] < '0' || item[0] > '3' || item[1] < '0' || item[1] > '3' || item[0] >= item[1]) {
        throw UsageError("flux: '" + item + "' is not of the form ij:n with i < j in 0..3");
      }
      const int i = item[0] - '0', j = item[1] - '0';
      const int n = config_detail::parse_int("flux", item.substr(3));
      f(forms::subset_index<2>({i, j, 0, 0})) += 2 * kPi * n / (g.period(i) * g.period(j));
    }
  }
  return TwoFormField(g, f);
}

/// Validates everything that can be checked without touching the grid.
inline void validate(const ExperimentConfig& c) {
  parse_metric_preset(c.metric);
  parse_theta_preset(c.theta);
  if (c.samples < 1) throw UsageError("samples: must be at least 1");
  if (!(c.eps > 0.0)) throw UsageError("eps: must be positive");
  if (!(c.amplitude >= 0.0)) throw UsageError("amplitude: must be non-negative");
  if (c.starts < 0) throw UsageError("starts: must be non-negative");
  if (c.max_iterations < 1) throw UsageError("max-iterations: must be positive");
  if (!(c.tolerance > 0.0)) throw UsageError("tolerance: must be positive");
  if (c.gate && !(*c.gate >= 0.0)) throw UsageError("gate: must be non-negative");
  if (c.omega_index < 0) throw UsageError("omega-index: must be non-negative");
  parse_flux(c.flux, c.grid());
}

}  // namespace swlab::app
