#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "randsum/pmf.hpp"

namespace randsum {

/// Truncated operator M[y][k] = P[ξ_1 + ... + ξ_k = y], 0 <= y, k <= K.
/// Column 0 is δ_0. Columns are stored densely up to kDenseLimit; above
/// that they are regenerated on demand.
class MarkovOperatorMatrix {
 public:
  static constexpr std::int64_t kDenseLimit = 2000;

  std::int64_t order() const noexcept { return order_; }
  bool dense() const noexcept { return !entries_.empty(); }
  std::span<const double> column_deficits() const noexcept {
    return column_deficits_;
  }

  double entry(std::int64_t y, std::int64_t k) const;

  /// Visits columns k = 0..K in ascending order as (k, column values on
  /// [0, K]).
  void for_each_column(
      const std::function<void(std::int64_t, std::span<const double>)>& fn)
      const;

  friend MarkovOperatorMatrix build_operator(const Pmf& xi, std::int64_t order);

 private:
  std::int64_t order_ = 0;
  Pmf xi_ = Pmf::point_mass(0);
  std::vector<double> entries_;  // column-major, (K+1) x (K+1)
  std::vector<double> column_deficits_;
};

enum class FixedPointStatus {
  Converged,
  /// Renormalized iterates stopped moving but the raw equation is not
  /// satisfied (a quasi-stationary law with mass still escaping).
  Stalled,
  NoConvergence,
};

const char* to_string(FixedPointStatus status);

struct FixedPointResult {
  Pmf f_star = Pmf::point_mass(0);
  double residual = 0.0;
  std::int64_t iterations = 0;
  double spectral_estimate = 0.0;
  /// Mass at 0 of the unrenormalized iterate M^n f0.
  double mass_at_zero_raw = 0.0;
  std::vector<double> step_changes;
  FixedPointStatus status = FixedPointStatus::NoConvergence;

  bool converged() const noexcept {
    return status == FixedPointStatus::Converged;
  }
};

MarkovOperatorMatrix build_operator(const Pmf& xi, std::int64_t order);

/// (M f)(y) = Σ_k f(k) M[y][k]; mass leaving [0, K] joins the deficit.
Pmf apply(const MarkovOperatorMatrix& m, const Pmf& f);

/// Power iteration f <- M f / |M f|. Stops when the sup-norm step change
/// drops below tol or after max_iter iterations.
FixedPointResult fixed_point(const MarkovOperatorMatrix& m, const Pmf& f0,
                             double tol, std::int64_t max_iter);

/// sup_j | Σ_{k≠j} f(k) M[j][k] - f(j) (1 - M[j][j]) |, which vanishes
/// exactly when M f = f on [0, K].
double residual_fixed_point_equation(const MarkovOperatorMatrix& m,
                                     const Pmf& f);

}  // namespace randsum
