#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "randsum/pmf.hpp"

namespace randsum {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Tail of the k-fold convolution of an exponential law with the given
/// rate (an Erlang tail).
struct AnalyticTail {
  double rate = 1.0;
  std::int64_t folds = 1;
};

/// Estimate of the exponential tail-decay parameter
///   C(F) = sup{ t >= 0 : F̄(x) e^{xt} -> 0 }.
/// value is +inf for bounded laws and for laws whose hazard grows without
/// bound over the window.
struct CParamEstimate {
  double value = 0.0;
  std::int64_t window_start = 0;
  std::int64_t window_end = 0;
  std::vector<double> hazard_series;
  bool converged = false;
  double spread = 0.0;
  double median_hazard = 0.0;

  bool infinite() const noexcept { return value == kInfinity; }
};

enum class TrichotomyKind {
  ConvergesToZero,
  ConvergesToPositive,
  Diverges,
  Inconclusive,
};

const char* to_string(TrichotomyKind kind);

struct TrichotomyVerdict {
  TrichotomyKind kind = TrichotomyKind::Inconclusive;
  std::optional<double> witness_constant;
  /// Fitted change of ln(series) across the last half of the series.
  double trend_slope = 0.0;
};

/// Certifies F̄(x) <= exp(-x * s_star) for x > x_threshold, where
/// s_star = s + ln(1/epsilon) / x_threshold.
struct BoundCertificate {
  double s = 0.0;
  double s_star = 0.0;
  std::int64_t x_threshold = 0;
  double epsilon = 0.0;
  /// Last x checked during self-validation.
  std::int64_t validated_through = 0;
};

struct InvarianceReport {
  std::vector<std::pair<std::int64_t, CParamEstimate>> estimates;
  /// Largest pairwise relative difference between estimates.
  double max_deviation = 0.0;
};

// Tunable thresholds of the estimator and the classifier.
inline constexpr std::int64_t kMinEstimationSupport = 10;
inline constexpr double kDeficitWindowFactor = 10.0;
inline constexpr double kConvergedSpread = 0.05;
inline constexpr double kSuperExponentialSpread = 0.5;
inline constexpr std::size_t kMinSeriesLength = 20;
inline constexpr double kTrendThreshold = 0.01;
inline constexpr double kPositiveRelativeSpread = 0.05;

double c_param_analytic(const AnalyticTail& t);

/// e^{-λx} Σ_{j<k} (λx)^j / j!, evaluated in log space.
double analytic_tail_eval(const AnalyticTail& t, double x);

/// Hazard-limit estimate of C(F) over the trailing window_fraction of the
/// region where the tail is still well above the truncation deficit.
///
/// The reported value is the intercept of a Theil-Sen fit
/// h(x) = c + b / (x + 1) over the window, i.e. the extrapolated limit of
/// the hazard. For a pure exponential tail b = 0 and the intercept is the
/// constant hazard; for tails of the form x^a e^{-Cx} it removes the
/// leading a / x bias that a plain median would carry. The fit ignores a
/// minority of outlying points, such as the last few hazards of a law
/// renormalized after truncation. spread is the range of the window
/// hazards once points more than three scaled median absolute deviations
/// from the median are set aside.
CParamEstimate c_param_estimate(const Pmf& p, double window_fraction);

/// c_param_estimate, except that bounded laws (deficit zero and support
/// shorter than the estimator minimum) map to +inf instead of throwing.
CParamEstimate c_param_or_bounded(const Pmf& p, double window_fraction);

/// [F̄(x) e^{xs}] for x = 0..x_max, computed as exp(ln F̄(x) + x s).
std::vector<double> scaled_tail_series(const Pmf& p, double s,
                                       std::int64_t x_max);

TrichotomyVerdict classify_trichotomy(std::span<const double> series);

BoundCertificate bound_certificate(const Pmf& p, double s, double epsilon);

InvarianceReport convolution_invariance_report(const Pmf& p,
                                               std::int64_t k_max,
                                               std::int64_t cap,
                                               double window_fraction = 0.25);

/// Relative pairwise spread of a set of C estimates. Two infinities agree;
/// an infinity against a finite value is an infinite deviation.
double max_relative_deviation(std::span<const double> values);

}  // namespace randsum
