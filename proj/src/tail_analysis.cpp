#include "randsum/tail_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <string>

namespace randsum {

namespace {

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

// Least-squares line y = a + b t; returns {a, b}.
std::pair<double, double> fit_line(std::span<const double> t, std::span<const double> y) {
  const double n = static_cast<double>(t.size());
  const double tm = std::accumulate(t.begin(), t.end(), 0.0) / n;
  const double ym = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double stt = 0.0;
  double sty = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - tm) * (t[i] - tm);
    sty += (t[i] - tm) * (y[i] - ym);
  }
  const double b = stt > 0.0 ? sty / stt : 0.0;
  return {ym - b * tm, b};
}

// Largest x in [offset, last] whose tail is positive and clear of the
// truncation loss, or offset - 1 when there is none.
std::int64_t last_reliable_x(const Pmf& p) {
  const double floor = kDeficitWindowFactor * p.mass_deficit();
  for (std::int64_t x = p.last(); x >= p.offset(); --x) {
    const double t = p.tail(x);
    if (t > 0.0 && t > floor) return x;
  }
  return p.offset() - 1;
}

// Range of v after dropping points more than three scaled MADs from the
// median (Hampel filter).
double trimmed_range(std::span<const double> v, double med) {
  std::vector<double> dev(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) dev[i] = std::abs(v[i] - med);
  const double limit = 3.0 * 1.4826 * median(dev);
  double lo = med;
  double hi = med;
  for (double x : v) {
    if (std::abs(x - med) > limit) continue;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return hi - lo;
}

// Theil-Sen line y = a + b t; returns {a, b}.
std::pair<double, double> robust_line(std::span<const double> t, std::span<const double> y) {
  std::vector<double> slopes;
  slopes.reserve(t.size() * (t.size() - 1) / 2);
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      if (t[j] != t[i]) slopes.push_back((y[j] - y[i]) / (t[j] - t[i]));
    }
  }
  const double b = slopes.empty() ? 0.0 : median(std::move(slopes));
  std::vector<double> intercepts(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) intercepts[i] = y[i] - b * t[i];
  return {median(std::move(intercepts)), b};
}

bool non_decreasing(std::span<const double> v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[i - 1] - 1e-12 * std::abs(v[i - 1])) return false;
  }
  return true;
}

}  // namespace

const char* to_string(TrichotomyKind kind) {
  switch (kind) {
    case TrichotomyKind::ConvergesToZero: return "ConvergesToZero";
    case TrichotomyKind::ConvergesToPositive: return "ConvergesToPositive";
    case TrichotomyKind::Diverges: return "Diverges";
    case TrichotomyKind::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

double c_param_analytic(const AnalyticTail& t) {
  // A polynomial prefactor does not move the supremum.
  return t.rate;
}

double analytic_tail_eval(const AnalyticTail& t, double x) {
  if (!(x >= 0.0)) throw Error(Errc::NegativeX, "x must be non-negative");
  if (!(t.rate > 0.0) || t.folds < 1) {
    throw Error(Errc::InvalidArgument, "rate must be positive and folds >= 1");
  }
  const double lx = t.rate * x;
  if (lx == 0.0) return 1.0;
  // log-sum-exp over the Erlang terms (λx)^j / j!
  const double log_lx = std::log(lx);
  std::vector<double> logs(static_cast<std::size_t>(t.folds));
  for (std::int64_t j = 0; j < t.folds; ++j) {
    logs[static_cast<std::size_t>(j)] =
        static_cast<double>(j) * log_lx - std::lgamma(static_cast<double>(j) + 1.0);
  }
  const double top = *std::max_element(logs.begin(), logs.end());
  double s = 0.0;
  for (double l : logs) s += std::exp(l - top);
  return std::exp(-lx + top + std::log(s));
}

CParamEstimate c_param_estimate(const Pmf& p, double window_fraction) {
  if (!(window_fraction > 0.0 && window_fraction < 1.0)) {
    throw Error(Errc::InvalidArgument, "window fraction must be in (0, 1)");
  }
  if (p.size() < kMinEstimationSupport) {
    throw Error(Errc::SupportTooShort,
                "support length " + std::to_string(p.size()) + " below " +
                    std::to_string(kMinEstimationSupport));
  }
  const std::int64_t x_hi = last_reliable_x(p);
  const std::int64_t n_valid = x_hi - p.offset() + 1;
  const auto width = std::max<std::int64_t>(
      3, static_cast<std::int64_t>(std::ceil(window_fraction * static_cast<double>(n_valid))));
  if (n_valid < width) {
    throw Error(Errc::DeficitDominatesWindow,
                "tail is indistinguishable from the truncation deficit");
  }

  CParamEstimate est;
  est.window_end = x_hi;
  est.window_start = x_hi - width + 1;
  std::vector<double> inv_x;
  for (std::int64_t x = est.window_start; x <= est.window_end; ++x) {
    est.hazard_series.push_back(hazard(p, x));
    inv_x.push_back(1.0 / static_cast<double>(x + 1));
  }
  est.median_hazard = median(est.hazard_series);
  est.spread = trimmed_range(est.hazard_series, est.median_hazard);

  if (non_decreasing(est.hazard_series) &&
      est.spread > kSuperExponentialSpread * est.median_hazard) {
    est.value = kInfinity;
    est.converged = false;
    return est;
  }
  est.value = std::max(0.0, robust_line(inv_x, est.hazard_series).first);
  est.converged = est.spread < kConvergedSpread * est.value;
  return est;
}

CParamEstimate c_param_or_bounded(const Pmf& p, double window_fraction) {
  if (p.mass_deficit() > 0.0 || p.size() >= kMinEstimationSupport) {
    return c_param_estimate(p, window_fraction);
  }
  // F̄ vanishes beyond the last support point: every t qualifies.
  CParamEstimate est;
  est.value = kInfinity;
  est.converged = true;
  est.window_start = p.offset() - 1;
  est.window_end = p.last();
  for (std::int64_t x = est.window_start; x <= est.window_end; ++x) {
    const double t = p.tail(x);
    est.hazard_series.push_back(t > 0.0 ? -std::log(t / p.tail(x - 1)) : kInfinity);
  }
  est.spread = kInfinity;
  est.median_hazard = median(est.hazard_series);
  return est;
}

std::vector<double> scaled_tail_series(const Pmf& p, double s, std::int64_t x_max) {
  if (!(s >= 0.0)) throw Error(Errc::InvalidArgument, "s must be non-negative");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(x_max + 1, 0)));
  for (std::int64_t x = 0; x <= x_max; ++x) {
    const double t = p.tail(x);
    if (s == 0.0 || t == 0.0) {
      out.push_back(t);
    } else {
      out.push_back(std::exp(std::log(t) + static_cast<double>(x) * s));
    }
  }
  return out;
}

TrichotomyVerdict classify_trichotomy(std::span<const double> series) {
  if (series.size() < kMinSeriesLength) {
    throw Error(Errc::SeriesTooShort, "need at least " + std::to_string(kMinSeriesLength) +
                                          " points, got " + std::to_string(series.size()));
  }
  for (double v : series) {
    if (std::isnan(v) || v < 0.0) {
      throw Error(Errc::InvalidArgument, "series entries must be non-negative");
    }
  }
  const std::size_t n = series.size();
  const auto half = series.subspan(n / 2);

  TrichotomyVerdict verdict;
  const auto first_zero = std::find(half.begin(), half.end(), 0.0);
  if (first_zero != half.end()) {
    const bool stays_zero = std::all_of(first_zero, half.end(), [](double v) { return v == 0.0; });
    verdict.kind = stays_zero ? TrichotomyKind::ConvergesToZero : TrichotomyKind::Inconclusive;
    verdict.trend_slope = stays_zero ? -kInfinity : 0.0;
    return verdict;
  }
  if (std::any_of(half.begin(), half.end(), [](double v) { return std::isinf(v); })) {
    verdict.kind = TrichotomyKind::Diverges;
    verdict.trend_slope = kInfinity;
    return verdict;
  }

  std::vector<double> idx(half.size());
  std::vector<double> logs(half.size());
  for (std::size_t i = 0; i < half.size(); ++i) {
    idx[i] = static_cast<double>(i);
    logs[i] = std::log(half[i]);
  }
  // slope per step times the span of the fit: the fitted log change
  verdict.trend_slope = fit_line(idx, logs).second * static_cast<double>(half.size() - 1);

  if (verdict.trend_slope < -kTrendThreshold) {
    verdict.kind = TrichotomyKind::ConvergesToZero;
  } else if (verdict.trend_slope > kTrendThreshold) {
    verdict.kind = TrichotomyKind::Diverges;
  } else {
    const auto [lo, hi] = std::minmax_element(half.begin(), half.end());
    const double mean = std::accumulate(half.begin(), half.end(), 0.0) /
                        static_cast<double>(half.size());
    if ((*hi - *lo) / mean < kPositiveRelativeSpread) {
      const auto quarter = series.subspan(3 * n / 4);
      verdict.kind = TrichotomyKind::ConvergesToPositive;
      verdict.witness_constant = std::accumulate(quarter.begin(), quarter.end(), 0.0) /
                                 static_cast<double>(quarter.size());
    } else {
      verdict.kind = TrichotomyKind::Inconclusive;
    }
  }
  return verdict;
}

BoundCertificate bound_certificate(const Pmf& p, double s, double epsilon) {
  if (!(s > 0.0)) throw Error(Errc::InvalidArgument, "s must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(Errc::InvalidArgument, "epsilon must be in (0, 1)");
  }
  const std::int64_t x_end = p.mass_deficit() > 0.0 ? last_reliable_x(p) : p.last();
  if (x_end < 1) throw Error(Errc::NoThresholdFound, "sampling window is empty");

  const auto series = scaled_tail_series(p, s, x_end);
  std::int64_t last_above = -1;
  for (std::int64_t x = x_end; x >= 0; --x) {
    if (!(series[static_cast<std::size_t>(x)] < epsilon)) {
      last_above = x;
      break;
    }
  }
  if (last_above >= x_end) {
    throw Error(Errc::NoThresholdFound,
                "F̄(x)e^{xs} does not fall below epsilon inside the window");
  }

  // The bound with s_star = s + ln(1/ε)/X is not implied by the ε-condition
  // alone for X close to the first crossing; move X out until it holds.
  const double log_inv_eps = std::log(1.0 / epsilon);
  for (std::int64_t threshold = std::max<std::int64_t>(1, last_above); threshold < x_end;
       ++threshold) {
    const double s_star = s + log_inv_eps / static_cast<double>(threshold);
    bool holds = true;
    for (std::int64_t x = threshold + 1; x <= x_end && holds; ++x) {
      const double t = p.tail(x);
      holds = t == 0.0 || std::log(t) <= -static_cast<double>(x) * s_star;
    }
    if (holds) return BoundCertificate{s, s_star, threshold, epsilon, x_end};
  }
  throw Error(Errc::NoThresholdFound, "no threshold validates the exponential bound");
}

double max_relative_deviation(std::span<const double> values) {
  double worst = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      const double a = values[i];
      const double b = values[j];
      if (a == b) continue;
      if (std::isinf(a) || std::isinf(b)) return kInfinity;
      const double lo = std::min(a, b);
      worst = std::max(worst, lo > 0.0 ? std::abs(a - b) / lo : kInfinity);
    }
  }
  return worst;
}

InvarianceReport convolution_invariance_report(const Pmf& p, std::int64_t k_max,
                                               std::int64_t cap, double window_fraction) {
  if (k_max < 2) throw Error(Errc::InvalidArgument, "k_max must be at least 2");

  std::vector<std::future<CParamEstimate>> jobs;
  for (std::int64_t k = 1; k <= k_max; ++k) {
    jobs.push_back(std::async(std::launch::async, [&p, k, cap, window_fraction] {
      return c_param_or_bounded(k == 1 ? p : self_convolve(p, k, cap), window_fraction);
    }));
  }
  InvarianceReport report;
  std::vector<double> values;
  for (std::int64_t k = 1; k <= k_max; ++k) {
    auto est = jobs[static_cast<std::size_t>(k - 1)].get();
    values.push_back(est.value);
    report.estimates.emplace_back(k, std::move(est));
  }
  report.max_deviation = max_relative_deviation(values);
  return report;
}

}  // namespace randsum
