#pragma once

// Independent reference computations used by the unit and acceptance
// tests. Nothing here calls into the convolution or evolution code of the
// library; laws are plain maps from support point to probability.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "randsum/pmf.hpp"

namespace randsum::oracle {

using Law = std::map<std::int64_t, double>;

inline Law to_law(const Pmf& p) {
  Law law;
  for (std::int64_t i = 0; i < p.size(); ++i) {
    if (p.probs()[i] > 0.0) law[p.offset() + i] = p.probs()[i];
  }
  return law;
}

/// Law of the sum of k iid draws, by walking every k-tuple.
inline Law enumerate_k_sum(const Law& law, int k) {
  Law out;
  std::function<void(int, std::int64_t, double)> walk =
      [&](int depth, std::int64_t sum, double prob) {
        if (depth == k) {
          out[sum] += prob;
          return;
        }
        for (const auto& [v, pv] : law) walk(depth + 1, sum + v, prob * pv);
      };
  walk(0, 0, 1.0);
  return out;
}

/// Law of the sum of `count` iid draws by enumerating occupation counts
/// (n_1, ..., n_m) over the m support points with multinomial weights.
inline Law multinomial_sum_law(const Law& law, std::int64_t count) {
  std::vector<std::int64_t> values;
  std::vector<double> probs;
  for (const auto& [v, p] : law) {
    values.push_back(v);
    probs.push_back(p);
  }
  const std::size_t m = values.size();
  Law out;
  std::vector<std::int64_t> occ(m, 0);
  std::function<void(std::size_t, std::int64_t)> walk =
      [&](std::size_t idx, std::int64_t remaining) {
        if (idx + 1 == m) {
          occ[idx] = remaining;
          double logw = std::lgamma(static_cast<double>(count) + 1.0);
          std::int64_t sum = 0;
          double prob = 1.0;
          for (std::size_t i = 0; i < m; ++i) {
            logw -= std::lgamma(static_cast<double>(occ[i]) + 1.0);
            prob *= std::pow(probs[i], static_cast<double>(occ[i]));
            sum += occ[i] * values[i];
          }
          out[sum] += std::round(std::exp(logw)) * prob;
          return;
        }
        for (std::int64_t c = 0; c <= remaining; ++c) {
          occ[idx] = c;
          walk(idx + 1, remaining - c);
        }
      };
  walk(0, count);
  return out;
}

/// Laws of X_0..X_n by exhaustive enumeration of every ξ draw along every
/// branch of the process tree. Only for tiny cases. Leaf probabilities are
/// accumulated with Neumaier summation, since large trees add up millions
/// of small terms.
inline std::vector<Law> tree_evolve(std::int64_t x0, const Law& xi, int n) {
  using Acc = std::map<std::int64_t, std::pair<double, double>>;
  std::vector<Acc> acc(static_cast<std::size_t>(n) + 1);
  auto add = [](std::pair<double, double>& a, double v) {
    const double t = a.first + v;
    a.second += std::abs(a.first) >= std::abs(v) ? (a.first - t) + v : (v - t) + a.first;
    a.first = t;
  };
  std::function<void(int, std::int64_t, double)> branch =
      [&](int step, std::int64_t state, double prob) {
        add(acc[static_cast<std::size_t>(step)][state], prob);
        if (step == n) return;
        // enumerate the state-many draws one at a time
        std::function<void(std::int64_t, std::int64_t, double)> draw =
            [&](std::int64_t left, std::int64_t sum, double p) {
              if (left == 0) {
                branch(step + 1, sum, p);
                return;
              }
              for (const auto& [v, pv] : xi) draw(left - 1, sum + v, p * pv);
            };
        draw(state, 0, prob);
      };
  branch(0, x0, 1.0);
  std::vector<Law> laws(acc.size());
  for (std::size_t m = 0; m < acc.size(); ++m) {
    for (const auto& [state, a] : acc[m]) laws[m][state] = a.first + a.second;
  }
  return laws;
}

/// Laws of X_0..X_n where each transition law is obtained by multinomial
/// enumeration.
inline std::vector<Law> multinomial_evolve(std::int64_t x0, const Law& xi,
                                           int n) {
  std::vector<Law> laws;
  laws.push_back(Law{{x0, 1.0}});
  std::map<std::int64_t, Law> transition;
  for (int step = 0; step < n; ++step) {
    Law next;
    for (const auto& [state, ps] : laws.back()) {
      if (state == 0) {
        next[0] += ps;
        continue;
      }
      auto it = transition.find(state);
      if (it == transition.end()) {
        it = transition.emplace(state, multinomial_sum_law(xi, state)).first;
      }
      for (const auto& [y, py] : it->second) next[y] += ps * py;
    }
    laws.push_back(std::move(next));
  }
  return laws;
}

inline double total_variation(const Law& a, const Pmf& b) {
  Law merged = a;
  double tv = 0.0;
  for (std::int64_t i = 0; i < b.size(); ++i) {
    merged[b.offset() + i];  // make sure the key exists
  }
  for (const auto& [x, pa] : merged) tv += std::abs(pa - b.at(x));
  return 0.5 * (tv + b.mass_deficit());
}

/// Poisson(mean) on [0, last] with the exact remaining tail as deficit.
inline Pmf poisson(double mean, std::int64_t last) {
  std::vector<double> probs;
  double term = std::exp(-mean);
  for (std::int64_t k = 0; k <= last; ++k) {
    if (k > 0) term *= mean / static_cast<double>(k);
    probs.push_back(term);
  }
  double deficit = 0.0;
  double t = term;
  for (std::int64_t k = last + 1; t > 0.0 && k < last + 10000; ++k) {
    t *= mean / static_cast<double>(k);
    deficit += t;
  }
  return Pmf::from_parts(0, std::move(probs), deficit);
}

/// P[X > x] straight from the definition, Σ_{y > x} f(y) + deficit.
inline double tail_by_definition(const Pmf& p, std::int64_t x) {
  double s = p.mass_deficit();
  for (std::int64_t y = p.last(); y > x && y >= p.offset(); --y) s += p.at(y);
  return x < p.offset() ? 1.0 : s;
}

/// Right-hand side of F̄^{*(k+1)}(x) = F̄(x) + Σ_{y=0}^{x} F̄^{*k}(x-y) f(y)
/// (the k-indexed form; k = 1 gives the two-fold identity).
/// With tails taken from their definitions.
inline double tail_recursion_rhs(const Pmf& base, const Pmf& k_fold,
                                 std::int64_t x) {
  double s = tail_by_definition(base, x);
  for (std::int64_t y = 0; y <= x; ++y) {
    const double dF = tail_by_definition(base, y - 1) -
                      tail_by_definition(base, y);
    s += tail_by_definition(k_fold, x - y) * dF;
  }
  return s;
}

/// The same recursion written with the upper-tail-inclusive function
/// G(x) = P[X >= x]:
///   G^{*(k+1)}(x) = G(x) + Σ_{y=0}^{x-1} G^{*k}(x-y) [G(y) - G(y+1)].
/// In this convention the sum runs to x - 1 and the increments are f(y).
inline double tail_recursion_rhs_inclusive(const Pmf& base, const Pmf& k_fold,
                                           std::int64_t x) {
  auto g = [](const Pmf& p, std::int64_t z) {
    return tail_by_definition(p, z - 1);
  };
  double s = g(base, x);
  for (std::int64_t y = 0; y <= x - 1; ++y) {
    s += g(k_fold, x - y) * (g(base, y) - g(base, y + 1));
  }
  return s;
}

/// Smallest root in [0, 1] of q = p0 + p2 q^2.
inline double extinction_two_point(double p0, double p2) {
  // p2 q^2 - q + p0 = 0
  const double disc = 1.0 - 4.0 * p2 * p0;
  return (1.0 - std::sqrt(disc)) / (2.0 * p2);
}

}  // namespace randsum::oracle
