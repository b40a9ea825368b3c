#include "randsum/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

namespace randsum::io {

json pmf_to_json(const Pmf& p) {
  return json{{"offset", p.offset()},
              {"probs", std::vector<double>(p.probs().begin(), p.probs().end())}};
}

Pmf pmf_from_json(const json& j) {
  try {
    if (!j.is_object() || !j.contains("offset") || !j.contains("probs")) {
      throw Error(Errc::ParseError, "pmf JSON needs \"offset\" and \"probs\"");
    }
    const auto& off = j.at("offset");
    if (!off.is_number_integer() || off.get<std::int64_t>() < 0) {
      throw Error(Errc::ParseError, "\"offset\" must be a non-negative integer");
    }
    const auto& arr = j.at("probs");
    if (!arr.is_array() || arr.empty()) {
      throw Error(Errc::ParseError, "\"probs\" must be a non-empty array");
    }
    std::vector<double> probs;
    probs.reserve(arr.size());
    double total = 0.0;
    for (const auto& v : arr) {
      if (!v.is_number()) throw Error(Errc::ParseError, "\"probs\" entries must be numbers");
      const double x = v.get<double>();
      if (!std::isfinite(x) || x < 0.0 || x > 1.0) {
        throw Error(Errc::ParseError, "probability out of [0, 1]");
      }
      probs.push_back(x);
      total += x;
    }
    if (std::abs(total - 1.0) > kLoadTolerance) {
      throw Error(Errc::ParseError, "probabilities sum to " + format_double(total) +
                                        ", not 1 within 1e-9");
    }
    if (total > 1.0 + 1e-12) {
      for (double& x : probs) x /= total;
      total = 1.0;
    }
    return Pmf::from_parts(off.get<std::int64_t>(), std::move(probs),
                           std::max(0.0, 1.0 - total));
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
}

Pmf read_pmf(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::FileNotFound, "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, path.string() + ": " + e.what());
  }
  return pmf_from_json(j);
}

json c_value_to_json(double value) {
  if (std::isinf(value)) return value > 0 ? json("inf") : json("-inf");
  return json(value);
}

json estimate_to_json(const CParamEstimate& e) {
  json hazards = json::array();
  for (double h : e.hazard_series) hazards.push_back(c_value_to_json(h));
  return json{{"value", c_value_to_json(e.value)},
              {"converged", e.converged},
              {"spread", c_value_to_json(e.spread)},
              {"median_hazard", c_value_to_json(e.median_hazard)},
              {"window_start", e.window_start},
              {"window_end", e.window_end},
              {"hazard_series", std::move(hazards)}};
}

json invariance_report_to_json(const InvarianceReport& r) {
  json estimates = json::array();
  for (const auto& [k, e] : r.estimates) {
    estimates.push_back(json{{"k", k},
                             {"value", c_value_to_json(e.value)},
                             {"spread", c_value_to_json(e.spread)},
                             {"converged", e.converged}});
  }
  return json{{"estimates", std::move(estimates)},
              {"max_deviation", c_value_to_json(r.max_deviation)}};
}

json fixed_point_diagnostics_to_json(const FixedPointResult& r) {
  return json{{"residual", r.residual},
              {"iterations", r.iterations},
              {"mass_at_zero_raw", r.mass_at_zero_raw},
              {"spectral_estimate", r.spectral_estimate},
              {"status", to_string(r.status)}};
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trace_csv(const SimulationTrace& trace) {
  std::string out = "path,step,value\n";
  out.reserve(out.size() + static_cast<std::size_t>(trace.n_paths * (trace.n_steps + 1)) * 12);
  for (std::int64_t p = 0; p < trace.n_paths; ++p) {
    const std::string prefix = std::to_string(p) + ",";
    for (std::int64_t s = 0; s <= trace.n_steps; ++s) {
      out += prefix;
      out += std::to_string(s);
      out += ',';
      out += std::to_string(trace.value(p, s));
      out += '\n';
    }
  }
  return out;
}

std::string moments_csv(std::span<const Moments> moments) {
  std::string out = "step,mean,variance\n";
  for (std::size_t i = 0; i < moments.size(); ++i) {
    out += std::to_string(i) + "," + format_double(moments[i].mean) + "," +
           format_double(moments[i].variance) + "\n";
  }
  return out;
}

std::string operator_csv(const MarkovOperatorMatrix& m) {
  std::string out = "y,k,value\n";
  for (std::int64_t y = 0; y <= m.order(); ++y) {
    for (std::int64_t k = 0; k <= m.order(); ++k) {
      const double v = m.entry(y, k);
      if (v == 0.0) continue;
      out += std::to_string(y) + "," + std::to_string(k) + "," + format_double(v) + "\n";
    }
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::FileNotFound, "cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw Error(Errc::FileNotFound, "write failed for " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(Errc::FileNotFound, "cannot move output into " + path.string());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace randsum::io
