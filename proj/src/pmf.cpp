#include "randsum/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

namespace randsum {

namespace {

// Sanity bound for Σ probs + deficit; the exact-arithmetic target is 1e-12
// and is what the tests hold results to.
constexpr double kNormalizationSlack = 1e-9;

// Strict weak order used to pick a canonical operand order in convolve().
bool canonical_less(const Pmf& a, const Pmf& b) {
  if (a.offset() != b.offset()) return a.offset() < b.offset();
  if (a.size() != b.size()) return a.size() < b.size();
  const auto pa = a.probs();
  const auto pb = b.probs();
  const auto [ia, ib] = std::mismatch(pa.begin(), pa.end(), pb.begin());
  if (ia != pa.end()) return *ia < *ib;
  return a.mass_deficit() < b.mass_deficit();
}

}  // namespace

Pmf::Pmf(std::int64_t offset, std::vector<double> probs, double deficit)
    : offset_(offset), probs_(std::move(probs)), deficit_(deficit) {
  tails_.resize(probs_.size());
  double t = deficit_;
  for (std::size_t i = probs_.size(); i-- > 0;) {
    tails_[i] = t;
    t += probs_[i];
  }
}

Pmf Pmf::from_weights(std::int64_t offset, std::span<const double> weights) {
  if (offset < 0) throw Error(Errc::InvalidArgument, "negative offset");
  if (weights.empty()) throw Error(Errc::EmptyWeights, "no weights given");
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w)) throw Error(Errc::NonFiniteWeight, "non-finite weight");
    if (w < 0.0) throw Error(Errc::NegativeWeight, "negative weight");
    total += w;
  }
  if (!(total > 0.0)) throw Error(Errc::EmptyWeights, "weights sum to zero");
  std::vector<double> probs(weights.begin(), weights.end());
  for (double& v : probs) v /= total;
  return from_parts(offset, std::move(probs), 0.0);
}

Pmf Pmf::from_parts(std::int64_t offset, std::vector<double> probs,
                    double mass_deficit) {
  if (offset < 0) throw Error(Errc::InvalidArgument, "negative offset");
  if (!(mass_deficit >= 0.0 && mass_deficit <= 1.0)) {
    throw Error(Errc::InvalidArgument,
                "mass deficit out of [0, 1]: " + std::to_string(mass_deficit));
  }
  double total = 0.0;
  for (double v : probs) {
    if (!std::isfinite(v)) throw Error(Errc::NonFiniteWeight, "non-finite probability");
    if (v < 0.0 || v > 1.0) {
      throw Error(Errc::NegativeWeight, "probability out of [0, 1]");
    }
    total += v;
  }
  if (std::abs(total + mass_deficit - 1.0) > kNormalizationSlack) {
    throw Error(Errc::InvalidArgument,
                "probabilities and deficit do not sum to 1");
  }

  const auto first = std::find_if(probs.begin(), probs.end(),
                                  [](double v) { return v > 0.0; });
  if (first == probs.end()) return pure_deficit(offset);
  const auto last = std::find_if(probs.rbegin(), probs.rend(),
                                 [](double v) { return v > 0.0; });
  const auto lead = first - probs.begin();
  std::vector<double> trimmed(first, last.base());
  return Pmf(offset + lead, std::move(trimmed), mass_deficit);
}

Pmf Pmf::point_mass(std::int64_t at) {
  if (at < 0) throw Error(Errc::InvalidArgument, "negative support point");
  return Pmf(at, {1.0}, 0.0);
}

Pmf Pmf::pure_deficit(std::int64_t offset) { return Pmf(offset, {0.0}, 1.0); }

double Pmf::at(std::int64_t x) const noexcept {
  if (x < offset_ || x > last()) return 0.0;
  return probs_[static_cast<std::size_t>(x - offset_)];
}

double Pmf::tail(std::int64_t x) const noexcept {
  if (x < offset_) return 1.0;
  if (x > last()) return deficit_;
  return tails_[static_cast<std::size_t>(x - offset_)];
}

double Pmf::stored_mass() const noexcept {
  return std::accumulate(probs_.begin(), probs_.end(), 0.0);
}

double tail(const Pmf& p, std::int64_t x) { return p.tail(x); }

double hazard(const Pmf& p, std::int64_t x) {
  const double now = p.tail(x);
  const double before = p.tail(x - 1);
  if (!(now > 0.0) || !(before > 0.0)) {
    throw Error(Errc::ZeroTail, "tail vanishes at x = " + std::to_string(x));
  }
  return -std::log(now / before);
}

Pmf truncate(const Pmf& p, std::int64_t cap) {
  if (p.last() <= cap) return p;
  if (p.offset() > cap) return Pmf::pure_deficit(p.offset());
  const auto keep = static_cast<std::size_t>(cap - p.offset() + 1);
  std::vector<double> probs(p.probs().begin(), p.probs().begin() + keep);
  // tail(cap) is already the deficit plus everything above the cap
  return Pmf::from_parts(p.offset(), std::move(probs), p.tail(cap));
}

Pmf convolve(const Pmf& a_in, const Pmf& b_in, std::int64_t cap) {
  const std::int64_t offset = a_in.offset() + b_in.offset();
  if (cap < offset) {
    throw Error(Errc::CapTooSmall, "cap " + std::to_string(cap) +
                                       " below smallest sum " +
                                       std::to_string(offset));
  }
  const bool swap = canonical_less(b_in, a_in);
  const Pmf& a = swap ? b_in : a_in;
  const Pmf& b = swap ? a_in : b_in;
  if (a.is_pure_deficit() || b.is_pure_deficit()) return Pmf::pure_deficit(offset);

  const auto pa = a.probs();
  const auto pb = b.probs();
  const std::int64_t la = a.size();
  const std::int64_t lb = b.size();
  const std::int64_t n = std::min(la + lb - 1, cap - offset + 1);

  // suffix[j] = Σ_{j' >= j} pb[j'], suffix[lb] = 0
  std::vector<double> suffix(static_cast<std::size_t>(lb) + 1, 0.0);
  for (std::int64_t j = lb; j-- > 0;) suffix[j] = suffix[j + 1] + pb[j];

  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  double overflow = 0.0;
  for (std::int64_t i = 0; i < la; ++i) {
    const double ai = pa[i];
    if (ai == 0.0) continue;
    const std::int64_t jmax = std::min(lb - 1, n - 1 - i);
    for (std::int64_t j = 0; j <= jmax; ++j) out[i + j] += ai * pb[j];
    const std::int64_t first_lost = std::max<std::int64_t>(jmax + 1, 0);
    if (first_lost < lb) overflow += ai * suffix[first_lost];
  }

  const double da = a.mass_deficit();
  const double db = b.mass_deficit();
  const double deficit = std::min(1.0, da + db * (1.0 - da) + overflow);
  return Pmf::from_parts(offset, std::move(out), deficit);
}

Pmf self_convolve(const Pmf& p, std::int64_t k, std::int64_t cap) {
  if (k < 1) throw Error(Errc::InvalidArgument, "k must be at least 1");
  if (k == 1) return p;
  const Pmf base = truncate(p, cap);
  Pmf acc = base;
  for (std::int64_t i = 2; i <= k; ++i) {
    if (acc.is_pure_deficit() || acc.offset() + base.offset() > cap) {
      return Pmf::pure_deficit(0);
    }
    acc = convolve(acc, base, cap);
  }
  return acc;
}

Moments moments(const Pmf& p) {
  if (!(p.mass_deficit() < 0.01)) {
    throw Error(Errc::ExcessiveDeficit,
                "mass deficit " + std::to_string(p.mass_deficit()) +
                    " too large for moments");
  }
  const auto probs = p.probs();
  const double total = p.stored_mass();
  double mean = 0.0;
  for (std::int64_t i = 0; i < p.size(); ++i) {
    mean += static_cast<double>(p.offset() + i) * probs[i];
  }
  mean /= total;
  double var = 0.0;
  for (std::int64_t i = 0; i < p.size(); ++i) {
    const double d = static_cast<double>(p.offset() + i) - mean;
    var += d * d * probs[i];
  }
  return {mean, var / total};
}

Pmf geometric(double q, std::int64_t last, std::int64_t shift) {
  if (!(q > 0.0 && q < 1.0)) throw Error(Errc::InvalidArgument, "q must be in (0, 1)");
  if (shift < 0 || last < shift) {
    throw Error(Errc::InvalidArgument, "geometric support is empty");
  }
  const auto n = static_cast<std::size_t>(last - shift + 1);
  std::vector<double> probs(n);
  double qj = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    probs[j] = (1.0 - q) * qj;
    qj *= q;
  }
  return Pmf::from_parts(shift, std::move(probs), std::pow(q, static_cast<double>(n)));
}

}  // namespace randsum
