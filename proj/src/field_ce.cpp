#include "mfgt/field_ce.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "mfgt/error.hpp"
#include "mfgt/paths.hpp"

namespace mfgt {

std::vector<FieldSample> field_along_measure(const CurveMeasure& xi,
                                             const ValueField& vf,
                                             const Model& model,
                                             const EvaluationCurveTable& eval,
                                             bool require_optimal) {
  const TorusGrid& grid = vf.grid();
  std::vector<FieldSample> samples;
  int atom_index = 0;
  for (const CurveAtom& a : xi.atoms()) {
    if (require_optimal) {
      const double action = action_of(a.curve, model, eval);
      const double identity = vf.value(a.curve.start(), 0) -
                              vf.final_datum()[static_cast<std::size_t>(a.curve.end())];
      if (std::abs(action - identity) > 1e-9) {
        throw Error(ErrorCode::kNotOptimalSupport,
                    "atom " + std::to_string(atom_index) +
                        " is not optimal for the value field");
      }
    }
    for (int k = 0; k < a.curve.n_steps(); ++k) {
      const int from = a.curve.nodes[static_cast<std::size_t>(k)];
      const int to = a.curve.nodes[static_cast<std::size_t>(k) + 1];
      FieldSample s;
      s.cell = from;
      s.k = k;
      s.velocity = periodic_displacement(grid.center(from), grid.center(to)) / grid.dt();
      s.source = FieldSource::kCurveVelocity;
      s.atom = atom_index;
      samples.push_back(s);
    }
    ++atom_index;
  }
  return samples;
}

double max_collision_gap(std::span<const FieldSample> samples) {
  std::map<std::pair<int, int>, std::vector<const FieldSample*>> by_point;
  for (const FieldSample& s : samples) by_point[{s.cell, s.k}].push_back(&s);
  double gap = 0.0;
  for (const auto& [key, list] : by_point) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      for (std::size_t j = i + 1; j < list.size(); ++j) {
        if (list[i]->atom == list[j]->atom) continue;
        gap = std::max(gap, (list[i]->velocity - list[j]->velocity).norm());
      }
    }
  }
  return gap;
}

std::vector<double> default_h_set(const TorusGrid& grid) {
  const double dt = grid.dt();
  return {-4 * dt, -2 * dt, -dt, dt, 2 * dt, 4 * dt};
}

DirectionalDerivative directional_derivative_test(
    const ValueField& vf, const Model& model, const EvaluationCurveTable& eval,
    int cell, int k, const Vec& q, std::span<const double> h_set,
    double tol_dd) {
  const TorusGrid& grid = vf.grid();
  if (k <= 0 || k >= grid.n_steps()) {
    throw Error(ErrorCode::kInvalidArgument, "directional test needs 0 < k < n_t");
  }
  const Point x = grid.center(cell);
  const double here = vf.value(cell, k);
  DirectionalDerivative out;
  out.g_estimate = -std::numeric_limits<double>::infinity();
  for (double h : h_set) {
    const double steps = h / grid.dt();
    const long m = std::lround(steps);
    if (m == 0 || std::abs(steps - static_cast<double>(m)) > 1e-9) {
      throw Error(ErrorCode::kInvalidArgument,
                  "directional steps must be nonzero multiples of dt");
    }
    const long target = k + m;
    if (target < 0 || target > grid.n_steps()) continue;
    const double there =
        interpolate(grid, vf.slice(static_cast<int>(target)), wrap_point(x + h * q));
    out.g_estimate = std::max(out.g_estimate, (there - here) / h);
    ++out.quotients_used;
  }
  out.lagrangian = model.lagrangian(x, eval.slices[static_cast<std::size_t>(k)], q);
  out.mismatch = std::abs(out.g_estimate + out.lagrangian);
  out.pass = out.quotients_used > 0 && out.mismatch <= tol_dd;
  return out;
}

HpComparison compare_with_hp(const ValueField& vf,
                             std::span<const FieldSample> samples,
                             const Model& model, double kink_threshold) {
  const TorusGrid& grid = vf.grid();
  HpComparison out;
  std::vector<double> smooth;
  for (const FieldSample& s : samples) {
    const std::span<const double> v = vf.slice(s.k);
    const Vec dv = central_gradient(grid, v, s.cell);
    const OneSidedGradient os = one_sided_gradient(grid, v, s.cell);
    SampleGap g;
    g.cell = s.cell;
    g.k = s.k;
    g.hp = model.hamiltonian_gradient(-1.0 * dv);
    g.gap = (s.velocity - g.hp).norm();
    for (int d = 0; d < grid.dim(); ++d) {
      if (std::abs(os.forward[d] - os.backward[d]) > kink_threshold) g.kink = true;
    }
    if (g.kink) {
      ++out.kink_count;
    } else {
      smooth.push_back(g.gap);
    }
    out.gaps.push_back(g);
  }
  if (!smooth.empty()) {
    std::sort(smooth.begin(), smooth.end());
    const std::size_t n = smooth.size();
    out.median = n % 2 == 1 ? smooth[n / 2] : 0.5 * (smooth[n / 2 - 1] + smooth[n / 2]);
    out.max = smooth.back();
  }
  return out;
}

std::vector<TestFunction> standard_test_family(int dim) {
  using std::numbers::pi;
  struct Factor {
    std::string id;
    std::function<double(double)> f;
    std::function<double(double)> df;
  };
  const std::vector<Factor> space = {
      {"1", [](double) { return 1.0; }, [](double) { return 0.0; }},
      {"sin", [](double x) { return std::sin(2 * pi * x); },
       [](double x) { return 2 * pi * std::cos(2 * pi * x); }},
      {"cos", [](double x) { return std::cos(2 * pi * x); },
       [](double x) { return -2 * pi * std::sin(2 * pi * x); }},
  };
  const std::vector<Factor> time = {
      {"1", [](double) { return 1.0; }, [](double) { return 0.0; }},
      {"t", [](double t) { return t; }, [](double) { return 1.0; }},
      {"t2/2", [](double t) { return 0.5 * t * t; }, [](double t) { return t; }},
  };

  std::vector<std::vector<Factor>> space_products;
  if (dim == 1) {
    for (const Factor& a : space) space_products.push_back({a});
  } else {
    for (const Factor& a : space) {
      for (const Factor& b : space) space_products.push_back({a, b});
    }
  }

  std::vector<TestFunction> family;
  for (const std::vector<Factor>& sp : space_products) {
    for (const Factor& tf : time) {
      std::string id;
      for (std::size_t d = 0; d < sp.size(); ++d) {
        id += (d ? "*" : "") + sp[d].id + (sp[d].id == "1" ? "" : "(x" + std::to_string(d) + ")");
      }
      id += "*" + tf.id;
      TestFunction fn;
      fn.id = id;
      auto space_value = [sp](const Point& x) {
        double v = 1.0;
        for (std::size_t d = 0; d < sp.size(); ++d) v *= sp[d].f(x[static_cast<int>(d)]);
        return v;
      };
      fn.value = [space_value, tf](const Point& x, double t) { return space_value(x) * tf.f(t); };
      fn.time_derivative = [space_value, tf](const Point& x, double t) {
        return space_value(x) * tf.df(t);
      };
      fn.gradient = [sp, tf](const Point& x, double t) {
        Vec g;
        for (std::size_t d = 0; d < sp.size(); ++d) {
          double v = sp[d].df(x[static_cast<int>(d)]);
          for (std::size_t e = 0; e < sp.size(); ++e) {
            if (e != d) v *= sp[e].f(x[static_cast<int>(e)]);
          }
          g[static_cast<int>(d)] = v * tf.f(t);
        }
        return g;
      };
      family.push_back(std::move(fn));
    }
  }
  return family;
}

std::vector<ContinuityResidual> continuity_residual(
    const TorusGrid& grid, const CurveMeasure& xi,
    std::span<const FieldSample> samples, std::span<const TestFunction> tests) {
  const int nt = xi.n_steps();
  const std::size_t natoms = xi.size();
  // velocity lookup per (atom, k)
  std::vector<const FieldSample*> lookup(natoms * static_cast<std::size_t>(nt), nullptr);
  for (const FieldSample& s : samples) {
    if (s.atom < 0 || static_cast<std::size_t>(s.atom) >= natoms || s.k < 0 || s.k >= nt) {
      continue;
    }
    const CurveAtom& a = xi.atoms()[static_cast<std::size_t>(s.atom)];
    if (a.curve.nodes[static_cast<std::size_t>(s.k)] != s.cell) continue;
    lookup[static_cast<std::size_t>(s.atom) * static_cast<std::size_t>(nt) +
           static_cast<std::size_t>(s.k)] = &s;
  }
  for (std::size_t i = 0; i < lookup.size(); ++i) {
    if (lookup[i] == nullptr) {
      throw Error(ErrorCode::kCoverageGap,
                  "atom " + std::to_string(i / static_cast<std::size_t>(nt)) +
                      " has no velocity sample at k = " +
                      std::to_string(i % static_cast<std::size_t>(nt)));
    }
  }

  std::vector<ContinuityResidual> out;
  for (const TestFunction& phi : tests) {
    ContinuityResidual r;
    r.id = phi.id;
    for (int k = 0; k < nt; ++k) {
      const double t = grid.time(k);
      double slice = 0.0;
      for (std::size_t a = 0; a < natoms; ++a) {
        const CurveAtom& atom = xi.atoms()[a];
        const Point x = grid.center(atom.curve.nodes[static_cast<std::size_t>(k)]);
        const FieldSample* s = lookup[a * static_cast<std::size_t>(nt) + static_cast<std::size_t>(k)];
        slice += atom.weight * (phi.time_derivative(x, t) + phi.gradient(x, t).dot(s->velocity));
      }
      r.lhs += grid.dt() * slice;
    }
    for (const CurveAtom& atom : xi.atoms()) {
      r.rhs += atom.weight * (phi.value(grid.center(atom.curve.end()), grid.horizon()) -
                              phi.value(grid.center(atom.curve.start()), 0.0));
    }
    r.residual = std::abs(r.lhs - r.rhs);
    out.push_back(std::move(r));
  }
  return out;
}

AbsContinuityProfile abs_continuity_profile(const TorusGrid& grid,
                                            const CurveMeasure& xi, double eps0) {
  if (!(eps0 > 0.0)) throw Error(ErrorCode::kInvalidArgument, "eps0 must be positive");
  AbsContinuityProfile p;
  p.exponent = (1.0 + eps0) / eps0;
  const EvaluationCurveTable eval = evaluation_curve(xi);
  double sum = 0.0;
  for (int k = 0; k < xi.n_steps(); ++k) {
    const double d = wasserstein1(grid, eval.slices[static_cast<std::size_t>(k)],
                                  eval.slices[static_cast<std::size_t>(k) + 1]);
    const double speed = d / grid.dt();
    p.speeds.push_back(speed);
    sum += grid.dt() * std::pow(speed, p.exponent);
  }
  p.norm = std::pow(sum, 1.0 / p.exponent);
  return p;
}

}  // namespace mfgt
