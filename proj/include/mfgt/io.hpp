#pragma once

#include <string>

#include <json.hpp>

#include "mfgt/field_ce.hpp"
#include "mfgt/hj.hpp"
#include "mfgt/measures.hpp"
#include "mfgt/mfg.hpp"
#include "mfgt/paths.hpp"

namespace mfgt {

// %.17g, so every double round-trips.
std::string format_double(double v);

// Pretty JSON with every float printed by format_double.
std::string dump_json(const nlohmann::ordered_json& j);

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

// k,t_k,i,x_i...,v,successor (successor -1 on the final slice).
std::string value_field_csv(const ValueField& vf);
// atom,weight,k,t_k,cell,x...
std::string curves_csv(const TorusGrid& grid, const CurveMeasure& xi);
std::string cost_matrix_csv(const CostMatrix& S);
// One atom per line: {"weight": w, "nodes": [...]}.
std::string curve_measure_jsonl(const CurveMeasure& xi);

nlohmann::ordered_json grid_to_json(const TorusGrid& grid);
TorusGrid grid_from_json(const nlohmann::json& j);

nlohmann::ordered_json curve_measure_to_json(const CurveMeasure& xi);
CurveMeasure curve_measure_from_json(const nlohmann::json& j);

nlohmann::ordered_json history_to_json(const std::vector<IterateRecord>& history);
nlohmann::ordered_json report_to_json(const EquilibriumReport& report,
                                      const TorusGrid& grid);

}  // namespace mfgt
