#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "randsum/compound_process.hpp"

using namespace randsum;

namespace {

const double kLn2 = std::log(2.0);

Pmf coin() { return Pmf::from_weights(0, {0.5, 0.5}); }

template <class F>
Errc error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return Errc::InvalidArgument;
}

}  // namespace

TEST_CASE("ProcessSpec validation") {
  CHECK(error_of([] { ProcessSpec{0, coin(), 10}.validate(); }) == Errc::InvalidArgument);
  CHECK(error_of([] { ProcessSpec{5, coin(), 4}.validate(); }) == Errc::CapTooSmall);
  CHECK_NOTHROW(ProcessSpec{5, coin(), 5}.validate());
}

TEST_CASE("compound_pmf examples") {
  auto two = compound_pmf(Pmf::point_mass(2), coin(), 100);
  CHECK(two.offset() == 0);
  REQUIRE(two.size() == 3);
  CHECK(two.at(0) == 0.25);
  CHECK(two.at(1) == 0.5);
  CHECK(two.at(2) == 0.25);
  CHECK(two.mass_deficit() == 0.0);

  auto p = Pmf::from_weights(1, {0.2, 0.0, 0.5, 0.3});
  CHECK(compound_pmf(Pmf::point_mass(1), p, 100) == p);

  auto mix = compound_pmf(Pmf::from_weights(1, {0.5, 0.5}), Pmf::point_mass(3), 100);
  CHECK(mix.offset() == 3);
  CHECK(mix.at(3) == 0.5);
  CHECK(mix.at(6) == 0.5);
  CHECK(mix.at(4) == 0.0);
  CHECK(mix.at(5) == 0.0);
}

TEST_CASE("compound_pmf: zero summands put mass at 0") {
  auto law = compound_pmf(Pmf::from_weights(0, {0.4, 0.6}), Pmf::point_mass(2), 10);
  CHECK(law.at(0) == 0.4);
  CHECK(law.at(2) == 0.6);
}

TEST_CASE("compound_pmf: deficit from the count and from the cap") {
  // count carries 0.1 deficit, summands of 3 overflow cap 7 from k = 3 on
  auto count = Pmf::from_parts(1, {0.3, 0.3, 0.3}, 0.1);
  auto law = compound_pmf(count, Pmf::point_mass(3), 7);
  CHECK(law.at(3) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(law.at(6) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(law.mass_deficit() == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(law.stored_mass() + law.mass_deficit() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(error_of([] { (void)compound_pmf(Pmf::point_mass(1), coin(), -1); }) ==
        Errc::CapTooSmall);
}

TEST_CASE("compound_pmf matches the multinomial oracle") {
  const oracle::Law xi{{0, 0.2}, {1, 0.3}, {3, 0.5}};
  const auto xi_pmf = Pmf::from_weights(0, {0.2, 0.3, 0.0, 0.5});
  const auto count = Pmf::from_weights(0, {0.1, 0.2, 0.3, 0.4});
  oracle::Law expected;
  for (std::int64_t k = 0; k <= 3; ++k) {
    for (const auto& [v, pv] : oracle::multinomial_sum_law(xi, k)) {
      expected[v] += count.at(k) * pv;
    }
  }
  CHECK(oracle::total_variation(expected, compound_pmf(count, xi_pmf, 100)) < 1e-15);
}

TEST_CASE("evolve examples") {
  auto fixed = evolve(ProcessSpec{1, Pmf::point_mass(1), 10}, 5);
  REQUIRE(fixed.size() == 6);
  for (const auto& f : fixed) CHECK(f == Pmf::point_mass(1));

  auto binom = evolve(ProcessSpec{2, coin(), 10}, 1);
  CHECK(binom[0] == Pmf::point_mass(2));
  CHECK(binom[1].at(0) == 0.25);
  CHECK(binom[1].at(1) == 0.5);
  CHECK(binom[1].at(2) == 0.25);

  auto three = evolve(ProcessSpec{1, coin(), 10}, 3);
  const auto tree = oracle::tree_evolve(1, {{0, 0.5}, {1, 0.5}}, 3);
  for (int m = 0; m <= 3; ++m) {
    CHECK(oracle::total_variation(tree[static_cast<std::size_t>(m)],
                                  three[static_cast<std::size_t>(m)]) < 1e-15);
  }
  CHECK(three[3].at(0) == doctest::Approx(7.0 / 8.0).epsilon(1e-15));

  CHECK(error_of([] { (void)evolve(ProcessSpec{1, coin(), 10}, -1); }) ==
        Errc::InvalidArgument);
}

TEST_CASE("evolve agrees with exhaustive enumeration") {
  const oracle::Law xi{{0, 0.25}, {1, 0.25}, {2, 0.5}};
  const auto xi_pmf = Pmf::from_weights(0, {0.25, 0.25, 0.5});
  for (std::int64_t x0 = 1; x0 <= 2; ++x0) {
    const auto laws = evolve(ProcessSpec{x0, xi_pmf, 64}, 3);
    const auto tree = oracle::tree_evolve(x0, xi, 3);
    for (std::size_t m = 0; m < laws.size(); ++m) {
      CHECK(oracle::total_variation(tree[m], laws[m]) < 1e-14);
    }
  }
}

TEST_CASE("propagate_moments examples") {
  // E[ξ] = 1.5, Var[ξ] = 0.25
  const auto xi = Pmf::from_weights(1, {0.5, 0.5});
  auto mom = propagate_moments(ProcessSpec{2, xi, 10}, 2);
  REQUIRE(mom.size() == 3);
  CHECK(mom[0].mean == 2.0);
  CHECK(mom[0].variance == 0.0);
  CHECK(mom[1].mean == 3.0);
  CHECK(mom[1].variance == 0.5);
  CHECK(mom[2].mean == 4.5);
  CHECK(mom[2].variance == 1.875);

  for (std::int64_t x0 : {1, 7}) {
    for (const auto& m : propagate_moments(ProcessSpec{x0, Pmf::point_mass(1), 10}, 6)) {
      CHECK(m.mean == static_cast<double>(x0));
      CHECK(m.variance == 0.0);
    }
  }
}

TEST_CASE("moments of evolved laws follow the recursion") {
  const std::vector<Pmf> fixtures{Pmf::from_weights(0, {0.5, 0.3, 0.2}),
                                  Pmf::from_weights(0, {0.25, 0.5, 0.25}),
                                  Pmf::from_weights(0, {0.2, 0.5, 0.3})};
  for (const auto& xi : fixtures) {
    const ProcessSpec spec{2, xi, 600};
    const auto laws = evolve(spec, 10);
    const auto mom = propagate_moments(spec, 10);
    REQUIRE(laws.back().mass_deficit() < 1e-9);
    for (std::size_t m = 0; m < laws.size(); ++m) {
      const auto got = moments(laws[m]);
      CHECK(got.mean == doctest::Approx(mom[m].mean).epsilon(1e-6));
      CHECK(got.variance == doctest::Approx(mom[m].variance).epsilon(1e-6));
    }
  }
}

TEST_CASE("absorption probability is non-decreasing") {
  const ProcessSpec spec{2, Pmf::from_weights(0, {0.2, 0.3, 0.5}), 800};
  const auto laws = evolve(spec, 12);
  for (std::size_t m = 1; m < laws.size(); ++m) {
    CHECK(laws[m].at(0) >= laws[m - 1].at(0));
  }
}

TEST_CASE("simulate examples") {
  auto constant = simulate(ProcessSpec{4, Pmf::point_mass(1), 10}, 6, 50, 17);
  CHECK(constant.n_paths == 50);
  CHECK(constant.n_steps == 6);
  CHECK(constant.absorbed_count == 0);
  for (std::int64_t p = 0; p < 50; ++p) {
    for (std::int64_t s = 0; s <= 6; ++s) CHECK(constant.value(p, s) == 4);
  }

  auto doubling = simulate(ProcessSpec{1, Pmf::point_mass(2), 64}, 5, 20, 3);
  for (std::int64_t p = 0; p < 20; ++p) {
    for (std::int64_t s = 0; s <= 5; ++s) CHECK(doubling.value(p, s) == (1 << s));
  }

  CHECK(error_of([] { (void)simulate(ProcessSpec{1, coin(), 10}, 0, 5, 1); }) ==
        Errc::InvalidArgument);
  CHECK(error_of([] { (void)simulate(ProcessSpec{1, coin(), 10}, 5, 0, 1); }) ==
        Errc::InvalidArgument);
}

TEST_CASE("simulate: mean and absorption agree with the exact laws") {
  const ProcessSpec spec{3, coin(), 10};
  const std::int64_t n = 100000;
  const auto trace = simulate(spec, 10, n, 20240607, 4);

  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::int64_t p = 0; p < n; ++p) {
    const double v = static_cast<double>(trace.value(p, 1));
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / n);
  CHECK(std::abs(mean - 1.5) < 3.0 * se);

  const double absorbed = evolve(spec, 10).back().at(0);
  const double freq = static_cast<double>(trace.absorbed_count) / n;
  const double se_abs = std::sqrt(absorbed * (1.0 - absorbed) / n);
  CHECK(std::abs(freq - absorbed) < 3.0 * se_abs);
}

TEST_CASE("simulate: empirical laws are close to the exact laws") {
  const ProcessSpec spec{2, Pmf::from_weights(0, {0.3, 0.4, 0.3}), 200};
  const std::int64_t n = 100000;
  const auto trace = simulate(spec, 4, n, 99, 0);
  const auto laws = evolve(spec, 4);
  for (std::int64_t m = 1; m <= 4; ++m) {
    oracle::Law empirical;
    for (std::int64_t p = 0; p < n; ++p) empirical[trace.value(p, m)] += 1.0 / n;
    CHECK(oracle::total_variation(empirical, laws[static_cast<std::size_t>(m)]) < 0.01);
  }
}

TEST_CASE("simulate: zero is absorbing and paths start at x0") {
  const auto trace = simulate(ProcessSpec{2, Pmf::from_weights(0, {0.4, 0.2, 0.4}), 100},
                              15, 2000, 5);
  std::int64_t absorbed = 0;
  for (std::int64_t p = 0; p < trace.n_paths; ++p) {
    CHECK(trace.value(p, 0) == 2);
    bool hit = false;
    for (std::int64_t s = 0; s <= trace.n_steps; ++s) {
      if (hit) CHECK(trace.value(p, s) == 0);
      hit = hit || trace.value(p, s) == 0;
    }
    if (trace.value(p, trace.n_steps) == 0) ++absorbed;
  }
  CHECK(absorbed == trace.absorbed_count);
  CHECK(absorbed > 0);
}

TEST_CASE("simulate is deterministic across runs and thread counts") {
  const ProcessSpec spec{3, Pmf::from_weights(0, {0.2, 0.3, 0.5}), 1000};
  const auto serial = simulate(spec, 8, 3001, 42, 1);
  CHECK(serial.paths == simulate(spec, 8, 3001, 42, 1).paths);
  for (unsigned threads : {2u, 3u, 8u, 0u}) {
    const auto parallel = simulate(spec, 8, 3001, 42, threads);
    CHECK(parallel.paths == serial.paths);
    CHECK(parallel.absorbed_count == serial.absorbed_count);
  }
  CHECK(simulate(spec, 8, 3001, 43, 1).paths != serial.paths);
}

TEST_CASE("c_param_over_time: the rate of F_m moves with m") {
  // ξ shifted geometric(1/2) from X_0 = 1. F_m is again shifted geometric
  // with P[X_m > x] = (1 - 2^{-m})^x, so its rate is ln(2^m / (2^m - 1)).
  const ProcessSpec spec{1, geometric(0.5, 300, 1), 300};
  const auto report = c_param_over_time(spec, 3, 0.25);
  CHECK(report.xi.value == doctest::Approx(kLn2).epsilon(1e-6));
  REQUIRE(report.steps.size() == 3);
  for (const auto& [m, est] : report.steps) {
    const double p = std::ldexp(1.0, static_cast<int>(m));
    CHECK(est.value == doctest::Approx(std::log(p / (p - 1.0))).epsilon(0.01));
  }
  CHECK(report.steps[0].second.value == doctest::Approx(kLn2).epsilon(1e-6));
  // ln(8/7) is far from ln 2
  CHECK(report.max_deviation > 0.7);
}

TEST_CASE("c_param_over_time: finite supports stay infinite") {
  for (std::int64_t a : {1, 2}) {
    const auto report = c_param_over_time(ProcessSpec{1, Pmf::point_mass(a), 64}, 3, 0.25);
    CHECK(std::isinf(report.xi.value));
    for (const auto& [m, est] : report.steps) CHECK(std::isinf(est.value));
    CHECK(report.max_deviation == 0.0);
  }
}
