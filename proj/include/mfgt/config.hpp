#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mfgt/atomic_measure.hpp"
#include "mfgt/models.hpp"
#include "mfgt/torus.hpp"

namespace mfgt {

struct GridConfig {
  int dim = 1;
  int n_x = 0;
  int n_t = 0;
  double horizon = 1.0;
  std::optional<double> q_max;  // default: Model::default_q_max
};

struct Mu0Config {
  enum class Kind { kUniform, kAtoms, kDensity };
  Kind kind = Kind::kUniform;
  std::vector<std::pair<CellIndex, double>> atoms;
  TrigPolynomial density;
};

struct SolverConfig {
  double alpha = 0.5;
  double tol = 1e-3;
  int max_iter = 50;
  unsigned long long seed = 0;
};

struct OutputConfig {
  std::string directory = "out";
  std::vector<std::string> formats{"csv", "json"};
  bool wants(std::string_view format) const;
};

struct FenchelConfig {
  Point x;
  std::vector<double> betas{0.5, 1.0, 2.0};
  std::vector<double> probe_fractions{0.25, 0.9, 1.5, 3.0};
  double q_radius = 8.0;
  double q_spacing = 0.05;
  double window = 1.0;  // probes |q| <= window for the convergence sweep
};

struct RunConfig {
  GridConfig grid;
  ModelSpec model;
  Mu0Config mu0;
  SolverConfig solver;
  OutputConfig output;
  FenchelConfig fenchel;

  TorusGrid make_grid() const;
  AtomicTorusMeasure make_mu0(const TorusGrid& grid) const;
  double q_max(const Model& model) const;

  // n_x and n_t multiplied by s; atom cells move to the cell holding their
  // old center.
  RunConfig scaled(double s) const;

  // Full config with every default materialized.
  nlohmann::ordered_json echo() const;
};

// Throws Error(kConfig) naming the offending field and its line.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

nlohmann::ordered_json trig_to_json(const TrigPolynomial& p);

}  // namespace mfgt
