#include "randsum/limit_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace randsum {

namespace {

// Columns of M in ascending k, generated by the same convolution chain
// compound_pmf() uses, so the operator and the evolution agree bit for bit.
template <class Fn>
void generate_columns(const Pmf& xi, std::int64_t order, std::int64_t max_k, Fn&& fn) {
  const Pmf base = truncate(xi, order);
  Pmf power = Pmf::point_mass(0);
  std::vector<double> column(static_cast<std::size_t>(order) + 1);
  for (std::int64_t k = 0; k <= max_k; ++k) {
    if (k == 1) {
      power = base;
    } else if (k > 1) {
      if (power.is_pure_deficit() || power.offset() + base.offset() > order) {
        power = Pmf::pure_deficit(0);
      } else {
        power = convolve(power, base, order);
      }
    }
    std::fill(column.begin(), column.end(), 0.0);
    if (!power.is_pure_deficit()) {
      const auto probs = power.probs();
      std::copy(probs.begin(), probs.end(),
                column.begin() + static_cast<std::ptrdiff_t>(power.offset()));
    }
    fn(k, std::span<const double>(column), power.mass_deficit());
  }
}

void require_within(const MarkovOperatorMatrix& m, const Pmf& f) {
  if (f.last() > m.order()) {
    throw Error(Errc::SupportExceedsK, "support reaches " + std::to_string(f.last()) +
                                           " beyond K = " + std::to_string(m.order()));
  }
}

Pmf normalized(const Pmf& p) {
  const double s = p.stored_mass();
  std::vector<double> probs(p.probs().begin(), p.probs().end());
  for (double& v : probs) v /= s;
  return Pmf::from_parts(p.offset(), std::move(probs), 0.0);
}

}  // namespace

const char* to_string(FixedPointStatus status) {
  switch (status) {
    case FixedPointStatus::Converged: return "Converged";
    case FixedPointStatus::Stalled: return "Stalled";
    case FixedPointStatus::NoConvergence: return "NoConvergence";
  }
  return "NoConvergence";
}

MarkovOperatorMatrix build_operator(const Pmf& xi, std::int64_t order) {
  if (order < 1) throw Error(Errc::InvalidArgument, "K must be at least 1");
  MarkovOperatorMatrix m;
  m.order_ = order;
  m.xi_ = xi;
  const auto n = static_cast<std::size_t>(order) + 1;
  m.column_deficits_.resize(n);
  const bool dense = order <= MarkovOperatorMatrix::kDenseLimit;
  if (dense) m.entries_.resize(n * n);
  generate_columns(xi, order, order,
                   [&](std::int64_t k, std::span<const double> column, double deficit) {
                     const auto kk = static_cast<std::size_t>(k);
                     m.column_deficits_[kk] = deficit;
                     if (dense) std::copy(column.begin(), column.end(), m.entries_.begin() + static_cast<std::ptrdiff_t>(kk * n));
                   });
  return m;
}

double MarkovOperatorMatrix::entry(std::int64_t y, std::int64_t k) const {
  if (y < 0 || k < 0 || y > order_ || k > order_) return 0.0;
  const auto n = static_cast<std::size_t>(order_) + 1;
  if (dense()) return entries_[static_cast<std::size_t>(k) * n + static_cast<std::size_t>(y)];
  if (k == 0) return y == 0 ? 1.0 : 0.0;
  return truncate(self_convolve(xi_, k, order_), order_).at(y);
}

void MarkovOperatorMatrix::for_each_column(
    const std::function<void(std::int64_t, std::span<const double>)>& fn) const {
  const auto n = static_cast<std::size_t>(order_) + 1;
  if (dense()) {
    for (std::size_t k = 0; k < n; ++k) {
      fn(static_cast<std::int64_t>(k), std::span<const double>(entries_).subspan(k * n, n));
    }
    return;
  }
  generate_columns(xi_, order_, order_,
                   [&](std::int64_t k, std::span<const double> column, double) { fn(k, column); });
}

Pmf apply(const MarkovOperatorMatrix& m, const Pmf& f) {
  require_within(m, f);
  std::vector<double> out(static_cast<std::size_t>(m.order()) + 1, 0.0);
  double deficit = f.mass_deficit();
  const auto deficits = m.column_deficits();
  m.for_each_column([&](std::int64_t k, std::span<const double> column) {
    const double w = f.at(k);
    if (w == 0.0) return;
    if (deficits[static_cast<std::size_t>(k)] < 1.0) {
      for (std::size_t y = 0; y < column.size(); ++y) out[y] += w * column[y];
    }
    deficit += w * deficits[static_cast<std::size_t>(k)];
  });
  return Pmf::from_parts(0, std::move(out), std::min(1.0, deficit));
}

double residual_fixed_point_equation(const MarkovOperatorMatrix& m, const Pmf& f) {
  require_within(m, f);
  const auto n = static_cast<std::size_t>(m.order()) + 1;
  std::vector<double> off_diagonal(n, 0.0);
  std::vector<double> diagonal(n, 0.0);
  m.for_each_column([&](std::int64_t k, std::span<const double> column) {
    const auto kk = static_cast<std::size_t>(k);
    diagonal[kk] = column[kk];
    const double w = f.at(k);
    if (w == 0.0) return;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != kk) off_diagonal[j] += w * column[j];
    }
  });
  double worst = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const auto jj = static_cast<std::int64_t>(j);
    const double lhs = off_diagonal[j] - f.at(jj) * (1.0 - diagonal[j]);
    worst = std::max(worst, std::abs(lhs));
  }
  return worst;
}

FixedPointResult fixed_point(const MarkovOperatorMatrix& m, const Pmf& f0, double tol,
                             std::int64_t max_iter) {
  if (!(tol > 0.0)) throw Error(Errc::InvalidArgument, "tol must be positive");
  if (max_iter < 1) throw Error(Errc::InvalidArgument, "max_iter must be at least 1");
  require_within(m, f0);
  if (!(f0.stored_mass() > 0.0)) {
    throw Error(Errc::InvalidArgument, "initial law has no mass inside [0, K]");
  }

  FixedPointResult result;
  double scale = f0.stored_mass();
  Pmf f = normalized(f0);
  double change = std::numeric_limits<double>::infinity();
  for (std::int64_t it = 1; it <= max_iter; ++it) {
    const Pmf g = apply(m, f);
    const double surviving = g.stored_mass();
    if (!(surviving > 0.0)) {
      scale = 0.0;
      break;
    }
    Pmf next = normalized(g);
    change = 0.0;
    const std::int64_t lo = std::min(f.offset(), next.offset());
    const std::int64_t hi = std::max(f.last(), next.last());
    for (std::int64_t y = lo; y <= hi; ++y) {
      change = std::max(change, std::abs(next.at(y) - f.at(y)));
    }
    result.step_changes.push_back(change);
    result.iterations = it;
    result.spectral_estimate = surviving;
    scale *= surviving;
    f = std::move(next);
    if (change < tol) break;
  }

  result.residual = residual_fixed_point_equation(m, f);
  result.mass_at_zero_raw = scale * f.at(0);
  if (change < tol) {
    result.status = result.residual <= 10.0 * tol ? FixedPointStatus::Converged
                                                  : FixedPointStatus::Stalled;
  } else {
    result.status = FixedPointStatus::NoConvergence;
  }
  result.f_star = std::move(f);
  return result;
}

}  // namespace randsum
