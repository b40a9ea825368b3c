#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "randsum/pmf.hpp"
#include "randsum/tail_analysis.hpp"

namespace randsum {

/// X_0 = x0, X_{n+1} = ξ_1 + ... + ξ_{X_n} with ξ ~ xi. State 0 is
/// absorbing (the empty sum). cap bounds every law computation.
struct ProcessSpec {
  std::int64_t x0 = 1;
  Pmf xi = Pmf::point_mass(1);
  std::int64_t cap = 1000;

  /// Throws InvalidArgument for x0 < 1 and CapTooSmall for cap < x0.
  void validate() const;
};

struct SimulationTrace {
  std::uint64_t seed = 0;
  std::int64_t n_paths = 0;
  std::int64_t n_steps = 0;
  /// Row-major, n_paths rows of n_steps + 1 values.
  std::vector<std::int64_t> paths;
  std::int64_t absorbed_count = 0;

  std::int64_t value(std::int64_t path, std::int64_t step) const {
    return paths[static_cast<std::size_t>(path * (n_steps + 1) + step)];
  }
};

struct OverTimeReport {
  CParamEstimate xi;
  /// (m, estimate of C(F_m)) for m = 1..n.
  std::vector<std::pair<std::int64_t, CParamEstimate>> steps;
  /// max_m |C(F_m) - C(F_ξ)| / C(F_ξ).
  double max_deviation = 0.0;
};

/// Law of ξ_1 + ... + ξ_N with N ~ count, truncated at cap.
Pmf compound_pmf(const Pmf& count, const Pmf& xi, std::int64_t cap);

/// [f_0, ..., f_n] with f_0 = δ_{x0}.
std::vector<Pmf> evolve(const ProcessSpec& spec, std::int64_t n);

/// Exact mean/variance recursion, no truncation involved.
std::vector<Moments> propagate_moments(const ProcessSpec& spec, std::int64_t n);

/// Monte Carlo paths. Each path draws from its own counter-based stream
/// keyed by (seed, path index), so the trace does not depend on threads.
/// threads == 0 uses the hardware concurrency.
SimulationTrace simulate(const ProcessSpec& spec, std::int64_t n_steps,
                         std::int64_t n_paths, std::uint64_t seed,
                         unsigned threads = 1);

OverTimeReport c_param_over_time(const ProcessSpec& spec, std::int64_t n,
                                 double window_fraction);

}  // namespace randsum
