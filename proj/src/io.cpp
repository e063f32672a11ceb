#include "mfgt/io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

#include "mfgt/error.hpp"

namespace mfgt {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_double(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
  return fmt::format("{:.17g}", v);
}

namespace {

void dump_into(const ordered_json& j, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) + 2, ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + json(k).dump() + ": ";
        dump_into(v, indent + 2, out);
      }
      out += "\n" + close + "}";
      return;
    }
    case json::value_t::array: {
      // Arrays of scalars stay on one line.
      const bool flat = std::none_of(j.begin(), j.end(), [](const ordered_json& e) {
        return e.is_structured();
      });
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const ordered_json& e : j) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += pad;
        dump_into(e, indent + 2, out);
      }
      out += flat ? "]" : "\n" + close + "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      // JSON has no literal for non-finite numbers.
      out += std::isfinite(v) ? format_double(v) : json(format_double(v)).dump();
      return;
    }
    default:
      out += j.dump();
  }
}

void append_point(std::string& out, const TorusGrid& grid, const Point& x) {
  for (int d = 0; d < grid.dim(); ++d) out += "," + format_double(x[d]);
}

std::string point_header(const TorusGrid& grid, const char* stem) {
  std::string h;
  for (int d = 0; d < grid.dim(); ++d) h += fmt::format(",{}{}", stem, d);
  return h;
}

double as_double(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "Infinity") return std::numeric_limits<double>::infinity();
    if (s == "-Infinity") return -std::numeric_limits<double>::infinity();
    if (s == "NaN") return std::numeric_limits<double>::quiet_NaN();
  }
  return j.get<double>();
}

}  // namespace

std::string dump_json(const ordered_json& j) {
  std::string out;
  dump_into(j, 0, out);
  out += "\n";
  return out;
}

void write_text(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path);
  out << content;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string value_field_csv(const ValueField& vf) {
  const TorusGrid& grid = vf.grid();
  std::string out = "k,t_k,i" + point_header(grid, "x") + ",v,successor\n";
  for (int k = 0; k <= grid.n_steps(); ++k) {
    for (int i = 0; i < grid.num_cells(); ++i) {
      out += fmt::format("{},{},{}", k, format_double(grid.time(k)), i);
      append_point(out, grid, grid.center(i));
      out += fmt::format(",{},{}\n", format_double(vf.value(i, k)),
                         k < grid.n_steps() ? vf.successor(i, k) : -1);
    }
  }
  return out;
}

std::string curves_csv(const TorusGrid& grid, const CurveMeasure& xi) {
  std::string out = "atom,weight,k,t_k,cell" + point_header(grid, "x") + "\n";
  for (std::size_t a = 0; a < xi.size(); ++a) {
    const CurveAtom& atom = xi.atoms()[a];
    for (int k = 0; k <= atom.curve.n_steps(); ++k) {
      const int cell = atom.curve.nodes[static_cast<std::size_t>(k)];
      out += fmt::format("{},{},{},{},{}", a, format_double(atom.weight), k,
                         format_double(grid.time(k)), cell);
      append_point(out, grid, grid.center(cell));
      out += "\n";
    }
  }
  return out;
}

std::string cost_matrix_csv(const CostMatrix& S) {
  std::string out;
  for (int i = 0; i < S.size(); ++i) {
    for (int j = 0; j < S.size(); ++j) {
      out += (j ? "," : "") + format_double(S.at(i, j));
    }
    out += "\n";
  }
  return out;
}

std::string curve_measure_jsonl(const CurveMeasure& xi) {
  std::string out;
  for (const CurveAtom& a : xi.atoms()) {
    out += fmt::format("{{\"weight\": {}, \"nodes\": {}}}\n", format_double(a.weight),
                       json(a.curve.nodes).dump());
  }
  return out;
}

ordered_json grid_to_json(const TorusGrid& grid) {
  return {{"dim", grid.dim()},
          {"n_x", grid.cells_per_dim()},
          {"n_t", grid.n_steps()},
          {"horizon", grid.horizon()}};
}

TorusGrid grid_from_json(const json& j) {
  return TorusGrid(j.at("dim").get<int>(), j.at("n_x").get<int>(), j.at("n_t").get<int>(),
                   as_double(j.at("horizon")));
}

ordered_json curve_measure_to_json(const CurveMeasure& xi) {
  ordered_json atoms = ordered_json::array();
  for (const CurveAtom& a : xi.atoms()) {
    atoms.push_back({{"weight", a.weight}, {"nodes", a.curve.nodes}});
  }
  return atoms;
}

CurveMeasure curve_measure_from_json(const json& j) {
  std::vector<CurveAtom> atoms;
  for (const json& a : j) {
    atoms.push_back({DiscreteCurve{a.at("nodes").get<std::vector<int>>(), std::nullopt},
                     as_double(a.at("weight"))});
  }
  return CurveMeasure(std::move(atoms));
}

ordered_json history_to_json(const std::vector<IterateRecord>& history) {
  ordered_json h = ordered_json::array();
  for (const IterateRecord& r : history) {
    h.push_back({{"iterate", r.iterate},
                 {"residual", r.residual},
                 {"gap", r.gap},
                 {"atoms", r.atoms}});
  }
  return h;
}

ordered_json report_to_json(const EquilibriumReport& report, const TorusGrid& grid) {
  ordered_json j;
  j["status"] = status_name(report.status);
  j["grid"] = grid_to_json(grid);
  j["q_max"] = report.vf.q_max();
  j["iterations"] = report.iterations;
  j["alpha"] = report.alpha;
  j["residual"] = report.residual;
  j["certificate_gap"] = report.certificate_gap;
  j["duality_chain"] = {{"action_integral", report.chain.action_integral},
                        {"transport_cost", report.chain.transport_cost},
                        {"dual_difference", report.chain.dual_difference}};
  ordered_json cont = ordered_json::array();
  for (const ContinuityResidual& r : report.continuity) {
    cont.push_back({{"id", r.id}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"residual", r.residual}});
  }
  j["continuity"] = cont;
  if (report.abs_continuity) {
    j["abs_continuity"] = {{"exponent", report.abs_continuity->exponent},
                           {"norm", report.abs_continuity->norm},
                           {"speeds", report.abs_continuity->speeds}};
  } else {
    j["abs_continuity"] = nullptr;
  }
  j["value_at_start"] = std::vector<double>(report.vf.slice(0).begin(), report.vf.slice(0).end());
  j["history"] = history_to_json(report.history);
  j["xi"] = curve_measure_to_json(report.xi);
  return j;
}

}  // namespace mfgt
