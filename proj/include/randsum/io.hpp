#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "randsum/compound_process.hpp"
#include "randsum/limit_solver.hpp"
#include "randsum/pmf.hpp"
#include "randsum/tail_analysis.hpp"

namespace randsum::io {

using nlohmann::json;

/// Probabilities must sum to 1 within this tolerance on load.
inline constexpr double kLoadTolerance = 1e-9;

// {"offset": int, "probs": [float...]}; the deficit is never written and is
// recomputed as 1 - Σ probs on load.
json pmf_to_json(const Pmf& p);
Pmf pmf_from_json(const json& j);

Pmf read_pmf(const std::filesystem::path& path);

/// Either a float or the string "inf".
json c_value_to_json(double value);
json estimate_to_json(const CParamEstimate& e);
json invariance_report_to_json(const InvarianceReport& r);
json fixed_point_diagnostics_to_json(const FixedPointResult& r);

std::string format_double(double v);

std::string trace_csv(const SimulationTrace& trace);
std::string moments_csv(std::span<const Moments> moments);
/// Row-major `y,k,value`, zero entries omitted.
std::string operator_csv(const MarkovOperatorMatrix& m);

/// Writes through a sibling temporary file and renames it into place, so
/// a failed run never leaves a partial file behind.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents);

std::string dump(const json& j);

}  // namespace randsum::io
