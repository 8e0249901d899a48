#pragma once

// JSON reports: schema "swlab.report/v1". Key order is lexicographic and
// numbers print in shortest round-trip form, so equal inputs give equal bytes.

#include "swlab/app/config.hpp"

#include <chrono>

namespace swlab::app {

inline constexpr const char* kReportSchema = "swlab.report/v1";

enum ExitCode : int { kSuccess = 0, kGateFailure = 1, kUsageError = 2, kNumericalError = 3 };

class Report {
 public:
  explicit Report(const ExperimentConfig& cfg) : cfg_(cfg) {}

  Json& results() { return results_; }
  const Json& results() const { return results_; }

  /// Records value <= threshold (upper = true) or value >= threshold; NaN fails.
  bool gate(const std::string& name, double value, double threshold, bool upper = true) {
    const bool ok = upper ? value <= threshold : value >= threshold;
    gates_.push_back({{"name", name}, {"value", value}, {"threshold", threshold}, {"kind", upper ? "<=" : ">="},
                      {"passed", ok}});
    passed_ = passed_ && ok;
    return ok;
  }

  void timing(const std::string& name, double seconds) {
    if (cfg_.timings) timings_[name] = seconds;
  }

  bool passed() const { return passed_; }

  Json to_json() const {
    Json j;
    j["schema"] = kReportSchema;
    j["command"] = cfg_.command;
    j["config"] = canonical_json(cfg_);
    j["config_digest"] = config_digest(cfg_);
    j["results"] = results_.is_null() ? Json::object() : results_;
    j["gates"] = gates_.is_null() ? Json::array() : gates_;
    j["status"] = passed_ ? "pass" : "fail";
    if (cfg_.timings) j["timings"] = timings_.is_null() ? Json::object() : timings_;
    return j;
  }

 private:
  const ExperimentConfig& cfg_;
  Json results_ = Json::object();
  Json gates_ = Json::array();
  Json timings_ = Json::object();
  bool passed_ = true;
};

/// Wall-clock stopwatch feeding Report::timing.
class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// min, max, integral and L2 norm of a scalar field.
inline Json summary(const ScalarField& f, const ScalarField& vol) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : f) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {{"min", lo}, {"max", hi}, {"integral", integrate(f, vol)}, {"l2", lp_norm(f, Norm::L2, vol)}};
}

}  // namespace swlab::app
