#include "randsum/compound_process.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "randsum/rng.hpp"

namespace randsum {

namespace {

// Simulated states above this are refused; the per-step cost is linear in
// the state.
constexpr std::int64_t kMaxSimulatedState = std::int64_t{1} << 31;

}  // namespace

void ProcessSpec::validate() const {
  if (x0 < 1) throw Error(Errc::InvalidArgument, "x0 must be a positive integer");
  if (cap < x0) {
    throw Error(Errc::CapTooSmall,
                "cap " + std::to_string(cap) + " below x0 " + std::to_string(x0));
  }
}

Pmf compound_pmf(const Pmf& count, const Pmf& xi, std::int64_t cap) {
  if (cap < 0) throw Error(Errc::CapTooSmall, "cap must be non-negative");

  std::vector<double> out(static_cast<std::size_t>(cap) + 1, 0.0);
  double deficit = count.mass_deficit();
  const Pmf base = truncate(xi, cap);

  // power holds the k-fold sum of ξ (k = 0: the empty sum at 0)
  Pmf power = Pmf::point_mass(0);
  for (std::int64_t k = 0; k <= count.last(); ++k) {
    if (k == 1) {
      power = base;
    } else if (k > 1) {
      if (power.is_pure_deficit() || power.offset() + base.offset() > cap) {
        power = Pmf::pure_deficit(0);
      } else {
        power = convolve(power, base, cap);
      }
    }
    if (power.is_pure_deficit()) {
      // every remaining count lands above the cap
      for (std::int64_t r = k; r <= count.last(); ++r) deficit += count.at(r);
      break;
    }
    const double w = count.at(k);
    if (w == 0.0) continue;
    const auto probs = power.probs();
    for (std::int64_t i = 0; i < power.size(); ++i) {
      out[static_cast<std::size_t>(power.offset() + i)] += w * probs[i];
    }
    deficit += w * power.mass_deficit();
  }
  return Pmf::from_parts(0, std::move(out), std::min(1.0, deficit));
}

std::vector<Pmf> evolve(const ProcessSpec& spec, std::int64_t n) {
  spec.validate();
  if (n < 0) throw Error(Errc::InvalidArgument, "n must be non-negative");
  std::vector<Pmf> laws;
  laws.reserve(static_cast<std::size_t>(n) + 1);
  laws.push_back(Pmf::point_mass(spec.x0));
  for (std::int64_t m = 0; m < n; ++m) {
    laws.push_back(compound_pmf(laws.back(), spec.xi, spec.cap));
  }
  return laws;
}

std::vector<Moments> propagate_moments(const ProcessSpec& spec, std::int64_t n) {
  spec.validate();
  if (n < 0) throw Error(Errc::InvalidArgument, "n must be non-negative");
  const Moments xi = moments(spec.xi);
  std::vector<Moments> out;
  out.push_back({static_cast<double>(spec.x0), 0.0});
  for (std::int64_t m = 0; m < n; ++m) {
    const Moments& cur = out.back();
    out.push_back({cur.mean * xi.mean,
                   cur.mean * xi.variance + cur.variance * xi.mean * xi.mean});
  }
  return out;
}

SimulationTrace simulate(const ProcessSpec& spec, std::int64_t n_steps, std::int64_t n_paths,
                         std::uint64_t seed, unsigned threads) {
  spec.validate();
  if (n_steps < 1 || n_paths < 1) {
    throw Error(Errc::InvalidArgument, "n_steps and n_paths must be at least 1");
  }
  // ξ is sampled from the stored block; any deficit is treated as absent.
  const auto probs = spec.xi.probs();
  std::vector<double> cumulative(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) cumulative[i] = acc += probs[i];
  const double total = acc;
  const std::int64_t xi_offset = spec.xi.offset();

  SimulationTrace trace;
  trace.seed = seed;
  trace.n_paths = n_paths;
  trace.n_steps = n_steps;
  const std::int64_t row = n_steps + 1;
  trace.paths.assign(static_cast<std::size_t>(n_paths * row), 0);

  auto run_path = [&](std::int64_t path) {
    CounterRng rng(seed, static_cast<std::uint64_t>(path));
    std::int64_t* out = trace.paths.data() + path * row;
    std::int64_t state = spec.x0;
    out[0] = state;
    for (std::int64_t step = 1; step <= n_steps; ++step) {
      std::int64_t next = 0;
      for (std::int64_t i = 0; i < state; ++i) {
        const double u = rng.uniform() * total;
        auto idx = std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                   cumulative.begin();
        idx = std::min<std::ptrdiff_t>(idx, static_cast<std::ptrdiff_t>(cumulative.size()) - 1);
        next += xi_offset + idx;
      }
      if (next > kMaxSimulatedState) {
        throw Error(Errc::InvalidArgument, "simulated state exceeds 2^31");
      }
      state = next;
      out[step] = state;
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const auto workers = static_cast<std::int64_t>(
      std::min<std::int64_t>(static_cast<std::int64_t>(threads), n_paths));
  if (workers <= 1) {
    for (std::int64_t p = 0; p < n_paths; ++p) run_path(p);
  } else {
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    const std::int64_t chunk = (n_paths + workers - 1) / workers;
    for (std::int64_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          const std::int64_t end = std::min(n_paths, (w + 1) * chunk);
          for (std::int64_t p = w * chunk; p < end; ++p) run_path(p);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  for (std::int64_t p = 0; p < n_paths; ++p) {
    if (trace.value(p, n_steps) == 0) ++trace.absorbed_count;
  }
  return trace;
}

OverTimeReport c_param_over_time(const ProcessSpec& spec, std::int64_t n,
                                 double window_fraction) {
  const auto laws = evolve(spec, n);
  OverTimeReport report;
  report.xi = c_param_or_bounded(spec.xi, window_fraction);
  const double ref = report.xi.value;
  for (std::int64_t m = 1; m <= n; ++m) {
    auto est = c_param_or_bounded(laws[static_cast<std::size_t>(m)], window_fraction);
    double dev = 0.0;
    if (est.value != ref) {
      dev = (std::isinf(ref) || std::isinf(est.value) || ref == 0.0)
                ? kInfinity
                : std::abs(est.value - ref) / ref;
    }
    report.max_deviation = std::max(report.max_deviation, dev);
    report.steps.emplace_back(m, std::move(est));
  }
  return report;
}

}  // namespace randsum
