#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <map>
#include <string>

#include "randsum/compound_process.hpp"
#include "randsum/io.hpp"
#include "randsum/limit_solver.hpp"
#include "randsum/tail_analysis.hpp"

namespace randsum::cli {

namespace {

using io::json;

struct Options {
  std::string a, b, count, xi, pmf, lateral;
  std::string output, moments_out, diagnostics_out, operator_out;
  std::int64_t cap = 1000;
  std::int64_t x0 = 1;
  std::int64_t steps = 10;
  std::int64_t paths = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::int64_t k_max = 4;
  double window = 0.25;
  double tol = 1e-12;
  std::int64_t max_iter = 10000;
  std::int64_t hops = 1;
  std::int64_t tau0 = 1;
};

// Outputs are staged and only written once the whole command succeeded.
class Outputs {
 public:
  explicit Outputs(std::ostream& out) : out_(out) {}

  void emit(const std::string& path, std::string contents) {
    if (path.empty()) {
      stdout_ += contents;
    } else {
      files_[path] = std::move(contents);
    }
  }

  void flush() {
    for (const auto& [path, contents] : files_) io::write_file_atomic(path, contents);
    out_ << stdout_;
  }

 private:
  std::ostream& out_;
  std::map<std::string, std::string> files_;
  std::string stdout_;
};

ProcessSpec process_spec(const Options& o, const Pmf& xi, std::int64_t x0) {
  ProcessSpec spec{x0, xi, o.cap};
  spec.validate();
  return spec;
}

void cmd_convolve(const Options& o, Outputs& out) {
  const Pmf a = io::read_pmf(o.a);
  const Pmf b = io::read_pmf(o.b);
  out.emit(o.output, io::dump(io::pmf_to_json(convolve(a, b, o.cap))));
}

void cmd_compound(const Options& o, Outputs& out) {
  const Pmf count = io::read_pmf(o.count);
  const Pmf xi = io::read_pmf(o.xi);
  out.emit(o.output, io::dump(io::pmf_to_json(compound_pmf(count, xi, o.cap))));
}

void cmd_evolve(const Options& o, Outputs& out) {
  const auto spec = process_spec(o, io::read_pmf(o.xi), o.x0);
  json laws = json::array();
  for (const auto& law : evolve(spec, o.steps)) laws.push_back(io::pmf_to_json(law));
  out.emit(o.output, io::dump(laws));
  if (!o.moments_out.empty()) {
    out.emit(o.moments_out, io::moments_csv(propagate_moments(spec, o.steps)));
  }
}

void cmd_simulate(const Options& o, Outputs& out) {
  const auto spec = process_spec(o, io::read_pmf(o.xi), o.x0);
  const auto trace = simulate(spec, o.steps, o.paths, o.seed, o.threads);
  out.emit(o.output, io::trace_csv(trace));
}

void cmd_cparam(const Options& o, Outputs& out) {
  const Pmf p = io::read_pmf(o.pmf);
  out.emit(o.output, io::dump(io::estimate_to_json(c_param_or_bounded(p, o.window))));
}

void cmd_invariance(const Options& o, Outputs& out) {
  const Pmf p = io::read_pmf(o.pmf);
  const auto report = convolution_invariance_report(p, o.k_max, o.cap, o.window);
  out.emit(o.output, io::dump(io::invariance_report_to_json(report)));
}

void cmd_fixedpoint(const Options& o, Outputs& out) {
  const Pmf xi = io::read_pmf(o.xi);
  const auto m = build_operator(xi, o.cap);
  const auto result = fixed_point(m, Pmf::point_mass(o.x0), o.tol, o.max_iter);
  out.emit(o.output, io::dump(io::pmf_to_json(result.f_star)));
  out.emit(o.diagnostics_out, io::dump(io::fixed_point_diagnostics_to_json(result)));
  if (!o.operator_out.empty()) out.emit(o.operator_out, io::operator_csv(m));
}

void cmd_delay_chain(const Options& o, Outputs& out) {
  const auto spec = process_spec(o, io::read_pmf(o.lateral), o.tau0);
  const auto laws = evolve(spec, o.hops);
  const auto mom = propagate_moments(spec, o.hops);
  json hops = json::array();
  for (std::int64_t h = 0; h <= o.hops; ++h) {
    const auto idx = static_cast<std::size_t>(h);
    json entry{{"hop", h},
               {"law", io::pmf_to_json(laws[idx])},
               {"mean", mom[idx].mean},
               {"variance", mom[idx].variance}};
    try {
      entry["c_param"] = io::c_value_to_json(c_param_or_bounded(laws[idx], o.window).value);
    } catch (const Error& e) {
      entry["c_param"] = nullptr;
      entry["c_param_error"] = std::string(to_string(e.code()));
    }
    hops.push_back(std::move(entry));
  }
  out.emit(o.output, io::dump(json{{"hops", std::move(hops)}}));
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Random-sum processes: compound laws, tail decay, limit laws", "randsum"};
  app.require_subcommand(1);

  auto add_output = [&](CLI::App* sub) {
    sub->add_option("-o,--output", o.output, "Output file (default: standard output)");
  };
  auto add_cap = [&](CLI::App* sub) {
    sub->add_option("--cap", o.cap, "Truncation cap for all law computations")
        ->check(CLI::PositiveNumber);
  };
  auto required = [](CLI::Option* opt) { return opt->required(); };

  auto* convolve_cmd = app.add_subcommand("convolve", "Convolve two pmfs");
  required(convolve_cmd->add_option("--a", o.a, "First pmf JSON"));
  required(convolve_cmd->add_option("--b", o.b, "Second pmf JSON"));
  add_cap(convolve_cmd);
  add_output(convolve_cmd);

  auto* compound_cmd = app.add_subcommand("compound", "Compound law of a random sum");
  required(compound_cmd->add_option("--count", o.count, "Law of the number of summands"));
  required(compound_cmd->add_option("--xi", o.xi, "Law of one summand"));
  add_cap(compound_cmd);
  add_output(compound_cmd);

  auto* evolve_cmd = app.add_subcommand("evolve", "Exact laws of X_0..X_n");
  required(evolve_cmd->add_option("--xi", o.xi, "Law of one summand"));
  evolve_cmd->add_option("--x0", o.x0, "Initial state")->check(CLI::PositiveNumber);
  evolve_cmd->add_option("--steps", o.steps, "Number of steps")->check(CLI::NonNegativeNumber);
  evolve_cmd->add_option("--moments", o.moments_out, "Write step,mean,variance CSV here");
  add_cap(evolve_cmd);
  add_output(evolve_cmd);

  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo trajectories");
  required(simulate_cmd->add_option("--xi", o.xi, "Law of one summand"));
  simulate_cmd->add_option("--x0", o.x0, "Initial state")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--steps", o.steps, "Number of steps")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--paths", o.paths, "Number of paths")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--seed", o.seed, "Seed of the counter-based streams");
  simulate_cmd->add_option("--threads", o.threads, "Worker threads (0: all cores)");
  add_cap(simulate_cmd);
  add_output(simulate_cmd);

  auto* cparam_cmd = app.add_subcommand("cparam", "Estimate the tail decay parameter C(F)");
  required(cparam_cmd->add_option("--pmf", o.pmf, "Pmf JSON"));
  cparam_cmd->add_option("--window", o.window, "Trailing window fraction");
  add_output(cparam_cmd);

  auto* invariance_cmd = app.add_subcommand("invariance", "C(F^{*k}) for k = 1..k_max");
  required(invariance_cmd->add_option("--pmf", o.pmf, "Pmf JSON"));
  invariance_cmd->add_option("--k-max", o.k_max, "Largest convolution power");
  invariance_cmd->add_option("--window", o.window, "Trailing window fraction");
  add_cap(invariance_cmd);
  add_output(invariance_cmd);

  auto* fixedpoint_cmd = app.add_subcommand("fixedpoint", "Fixed point of the truncated operator");
  required(fixedpoint_cmd->add_option("--xi", o.xi, "Law of one summand"));
  fixedpoint_cmd->add_option("--x0", o.x0, "Start from the point mass at x0")
      ->check(CLI::NonNegativeNumber);
  fixedpoint_cmd->add_option("--tol", o.tol, "Step-change tolerance");
  fixedpoint_cmd->add_option("--max-iter", o.max_iter, "Iteration limit");
  fixedpoint_cmd->add_option("--diagnostics", o.diagnostics_out,
                             "Diagnostics JSON (default: standard output)");
  fixedpoint_cmd->add_option("--operator-csv", o.operator_out, "Dump the operator as y,k,value");
  add_cap(fixedpoint_cmd);
  add_output(fixedpoint_cmd);

  auto* chain_cmd = app.add_subcommand("delay-chain", "Inter-delay law along a router chain");
  required(chain_cmd->add_option("--lateral", o.lateral, "Law of the lateral traffic ξ"));
  chain_cmd->add_option("--hops", o.hops, "Number of routers")->check(CLI::NonNegativeNumber);
  chain_cmd->add_option("--tau0", o.tau0, "Initial inter-delay")->check(CLI::PositiveNumber);
  chain_cmd->add_option("--window", o.window, "Trailing window fraction for C");
  add_cap(chain_cmd);
  add_output(chain_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << "Run with --help for usage.\n";
    return 2;
  }

  Outputs outputs(out);
  try {
    if (*convolve_cmd) cmd_convolve(o, outputs);
    else if (*compound_cmd) cmd_compound(o, outputs);
    else if (*evolve_cmd) cmd_evolve(o, outputs);
    else if (*simulate_cmd) cmd_simulate(o, outputs);
    else if (*cparam_cmd) cmd_cparam(o, outputs);
    else if (*invariance_cmd) cmd_invariance(o, outputs);
    else if (*fixedpoint_cmd) cmd_fixedpoint(o, outputs);
    else if (*chain_cmd) cmd_delay_chain(o, outputs);
    outputs.flush();
  } catch (const Error& e) {
    err << json{{"error", std::string(to_string(e.code()))}, {"message", e.what()}}.dump()
        << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << json{{"error", "Internal"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace randsum::cli
