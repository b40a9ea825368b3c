#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "randsum/error.hpp"

namespace randsum {

/// Finite probability mass function on the non-negative integers.
///
/// The support is the contiguous block [offset, offset + size - 1]. Any
/// probability that was cut off by a truncation cap is kept in
/// mass_deficit and is understood to sit strictly above the stored block,
/// so tail(x) stays an exact upper-tail probability for x inside the
/// block. Values are immutable once built.
class Pmf {
 public:
  /// Normalized pmf from non-negative weights; deficit is zero.
  static Pmf from_weights(std::int64_t offset, std::span<const double> weights);
  static Pmf from_weights(std::int64_t offset, std::initializer_list<double> weights) {
    return from_weights(offset, std::span<const double>(weights.begin(), weights.size()));
  }

  /// Pmf from already-normalized probabilities plus the truncated mass.
  /// Leading and trailing zeros are trimmed (offset adjusted).
  static Pmf from_parts(std::int64_t offset, std::vector<double> probs,
                        double mass_deficit);

  static Pmf point_mass(std::int64_t at);

  /// All mass lost above the cap: probs = [0], deficit = 1.
  static Pmf pure_deficit(std::int64_t offset = 0);

  std::int64_t offset() const noexcept { return offset_; }
  std::int64_t size() const noexcept {
    return static_cast<std::int64_t>(probs_.size());
  }
  /// Largest support point stored.
  std::int64_t last() const noexcept { return offset_ + size() - 1; }
  std::span<const double> probs() const noexcept { return probs_; }
  double mass_deficit() const noexcept { return deficit_; }
  bool is_pure_deficit() const noexcept {
    return probs_.size() == 1 && probs_[0] == 0.0;
  }

  /// f(x); zero outside the stored block.
  double at(std::int64_t x) const noexcept;

  /// P[X > x], including the deficit.
  double tail(std::int64_t x) const noexcept;

  /// Σ probs.
  double stored_mass() const noexcept;

  friend bool operator==(const Pmf&, const Pmf&) = default;

 private:
  Pmf(std::int64_t offset, std::vector<double> probs, double deficit);

  std::int64_t offset_ = 0;
  std::vector<double> probs_;
  double deficit_ = 0.0;
  // tails_[i] = P[X > offset + i]
  std::vector<double> tails_;
};

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

inline Pmf pmf_new(std::int64_t offset, std::span<const double> weights) {
  return Pmf::from_weights(offset, weights);
}

double tail(const Pmf& p, std::int64_t x);

/// Discrete log-hazard -ln(F̄(x) / F̄(x-1)). Throws ZeroTail when either
/// tail vanishes.
double hazard(const Pmf& p, std::int64_t x);

/// Moves all mass above cap into the deficit.
Pmf truncate(const Pmf& p, std::int64_t cap);

/// a * b restricted to [0, cap]. Mass above the cap and both inherited
/// deficits go to the deficit of the result. Exactly commutative.
Pmf convolve(const Pmf& a, const Pmf& b, std::int64_t cap);

/// k-fold convolution power. k = 1 returns p unchanged; for k >= 2 the
/// chain is truncate(p, cap) convolved k - 1 times. If the smallest
/// possible sum exceeds the cap the result is a pure deficit.
Pmf self_convolve(const Pmf& p, std::int64_t k, std::int64_t cap);

/// Mean and variance of the stored block, renormalized by its mass.
/// Requires mass_deficit < 0.01.
Moments moments(const Pmf& p);

/// Geometric law P[X = shift + j] = (1 - q) q^j for j = 0..last-shift,
/// with the exact remaining tail q^(last-shift+1) carried as deficit.
Pmf geometric(double q, std::int64_t last, std::int64_t shift = 0);

}  // namespace randsum
