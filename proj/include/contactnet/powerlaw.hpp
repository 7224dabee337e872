#pragma once

// Discrete power-law tools: Hurwitz zeta, the maximum-likelihood exponent
// estimator for p(k) = k^-alpha / zeta(alpha, kmin) on k >= kmin, a bounded
// sampler, and logarithmic histograms for plotting broad distributions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "contactnet/error.hpp"

namespace contactnet {

// Hurwitz zeta sum_{k>=0} (q+k)^-s for s > 1, q > 0, by Euler-Maclaurin
// summation after N explicit terms.
inline double hurwitz_zeta(double s, double q) {
  if (!(s > 1.0) || !(q > 0.0))
    throw DataError("hurwitz_zeta requires s > 1 and q > 0");

  constexpr int kExplicit = 12;
  // B_{2j} / (2j)!
  constexpr double kCoeff[] = {1.0 / 12.0,
                               -1.0 / 720.0,
                               1.0 / 30240.0,
                               -1.0 / 1209600.0,
                               1.0 / 47900160.0,
                               -691.0 / 1307674368000.0,
                               1.0 / 74724249600.0};

  double sum = 0.0;
  for (int k = 0; k < kExplicit; ++k)
    sum += std::pow(q + k, -s);

  const double a = q + kExplicit;
  sum += std::pow(a, 1.0 - s) / (s - 1.0);
  sum += 0.5 * std::pow(a, -s);

  // Rising factorial s(s+1)...(s+2j-2) times a^(-s-2j+1).
  double rising = s;
  double power = std::pow(a, -s - 1.0);
  for (int j = 0; j < 7; ++j) {
    sum += kCoeff[j] * rising * power;
    rising *= (s + 2 * j + 1) * (s + 2 * j + 2);
    power /= a * a;
  }
  return sum;
}

struct FitResult {
  double exponent = 0.0;
  double xmin = 0.0;
  std::size_t n_tail = 0;
  double std_err = 0.0;
};

inline constexpr std::size_t kMinTailSamples = 10;

// Maximum-likelihood exponent of a discrete power law fitted to the samples at
// or above xmin. Samples live on the lattice unit*{1,2,3,...}; durations in
// seconds on a 20 s grid use unit = 20.
inline FitResult fit_power_law(std::span<const double> samples, double xmin, double unit = 1.0) {
  if (!(unit > 0.0))
    throw ConfigError("lattice unit must be positive");
  const double kmin = std::round(xmin / unit);
  if (kmin < 1.0)
    throw ConfigError("xmin must be at least one lattice unit");

  std::vector<double> tail;
  for (double x : samples) {
    const double k = std::round(x / unit);
    if (k >= kmin)
      tail.push_back(k);
  }
  if (tail.size() < kMinTailSamples)
    throw InsufficientDataError("power-law fit needs at least 10 samples >= xmin, got " +
                                std::to_string(tail.size()));
  if (std::all_of(tail.begin(), tail.end(), [&](double k) { return k == tail.front(); }))
    throw DegenerateDataError("all tail samples are identical");

  const double n = static_cast<double>(tail.size());
  double sum_log = 0.0;
  for (double k : tail)
    sum_log += std::log(k);

  const auto loglik = [&](double alpha) {
    return -n * std::log(hurwitz_zeta(alpha, kmin)) - alpha * sum_log;
  };

  // The log-likelihood is concave in alpha; golden-section search.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 1.0 + 1e-9;
  double hi = 30.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = loglik(c);
  double fd = loglik(d);
  while (hi - lo > 1e-10) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = loglik(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = loglik(d);
    }
  }
  FitResult fit;
  fit.exponent = 0.5 * (lo + hi);
  fit.xmin = kmin * unit;
  fit.n_tail = tail.size();
  fit.std_err = (fit.exponent - 1.0) / std::sqrt(n);
  return fit;
}

// Draws integers in [dmin, dmax] with probability proportional to d^-alpha.
// The cumulative table is built once, so reuse one sampler for many draws.
class BoundedPowerLaw {
public:
  BoundedPowerLaw(double alpha, std::int64_t dmin, std::int64_t dmax)
      : dmin_(dmin), alpha_(alpha) {
    if (dmin < 1 || dmax < dmin)
      throw ConfigError("duration bounds need 1 <= dmin <= dmax");
    if (!(alpha > 1.0))
      throw ConfigError("power-law exponent must exceed 1");
    cdf_.reserve(static_cast<std::size_t>(dmax - dmin + 1));
    double acc = 0.0;
    for (std::int64_t d = dmin; d <= dmax; ++d) {
      acc += std::pow(static_cast<double>(d), -alpha);
      cdf_.push_back(acc);
    }
    for (double &c : cdf_)
      c /= acc;
    cdf_.back() = 1.0;
  }

  template <class Rng>
  std::int64_t operator()(Rng &rng) const {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()),
                                           cdf_.size() - 1);
    return dmin_ + static_cast<std::int64_t>(idx);
  }

  std::int64_t min() const { return dmin_; }
  std::int64_t max() const { return dmin_ + static_cast<std::int64_t>(cdf_.size()) - 1; }
  double exponent() const { return alpha_; }

private:
  std::int64_t dmin_;
  double alpha_;
  std::vector<double> cdf_;
};

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  double density = 0.0; // count / (n * width)
};

// Histogram with logarithmically spaced edges starting at the smallest
// positive sample. Non-positive samples are ignored.
inline std::vector<HistogramBin> log_histogram(std::span<const double> samples,
                                               int bins_per_decade = 5) {
  if (bins_per_decade < 1)
    throw ConfigError("bins per decade must be >= 1");
  std::vector<double> xs;
  for (double x : samples)
    if (x > 0.0)
      xs.push_back(x);
  if (xs.empty())
    return {};
  std::sort(xs.begin(), xs.end());

  const double ratio = std::pow(10.0, 1.0 / bins_per_decade);
  std::vector<HistogramBin> bins;
  double lo = xs.front();
  std::size_t i = 0;
  while (i < xs.size()) {
    HistogramBin b;
    b.lo = lo;
    b.hi = lo * ratio;
    while (i < xs.size() && xs[i] < b.hi) {
      ++b.count;
      ++i;
    }
    b.density = static_cast<double>(b.count) / (static_cast<double>(xs.size()) * (b.hi - b.lo));
    bins.push_back(b);
    lo = b.hi;
  }
  return bins;
}

} // namespace contactnet
