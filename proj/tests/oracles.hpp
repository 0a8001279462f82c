#pragma once

// Reference computations used only by tests. They follow the textbook
// definitions directly and share no code with the library's indicator path.

#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline bool defined(double v) { return std::isfinite(v); }

inline std::vector<double> sma(const std::vector<double>& x, int n) {
  std::vector<double> out(x.size(), kNaN);
  for (std::size_t i = static_cast<std::size_t>(n) - 1; i < x.size(); ++i) {
    double sum = 0.0;
    bool ok = true;
    for (std::size_t j = i + 1 - n; j <= i; ++j) {
      ok = ok && defined(x[j]);
      sum += x[j];
    }
    if (ok) out[i] = sum / n;
  }
  return out;
}

// Window dot product with weights 1..n (oldest..newest) over n(n+1)/2.
inline std::vector<double> wma(const std::vector<double>& x, int n) {
  std::vector<double> out(x.size(), kNaN);
  const double denom = n * (n + 1) / 2.0;
  for (std::size_t i = static_cast<std::size_t>(n) - 1; i < x.size(); ++i) {
    double acc = 0.0;
    bool ok = true;
    for (int k = 0; k < n; ++k) {
      const double v = x[i + 1 - n + k];
      ok = ok && defined(v);
      acc += (k + 1) * v;
    }
    if (ok) out[i] = acc / denom;
  }
  return out;
}

// Closed form of the seeded recursion: after seeding at index s with the mean
// of the first n values, EMA_t = (1-q)^(t-s) * seed + sum_k q (1-q)^k x_{t-k}.
// Assumes every input is defined.
inline std::vector<double> ema(const std::vector<double>& x, int n) {
  std::vector<double> out(x.size(), kNaN);
  if (x.size() < static_cast<std::size_t>(n)) return out;
  const double q = 2.0 / (n + 1);
  const std::size_t s = n - 1;
  double seed = 0.0;
  for (std::size_t j = 0; j <= s; ++j) seed += x[j];
  seed /= n;
  for (std::size_t t = s; t < x.size(); ++t) {
    const std::size_t steps = t - s;
    double acc = std::pow(1.0 - q, static_cast<double>(steps)) * seed;
    for (std::size_t k = 0; k < steps; ++k) {
      acc += q * std::pow(1.0 - q, static_cast<double>(k)) * x[t - k];
    }
    out[t] = acc;
  }
  return out;
}

inline std::vector<double> random_series(std::mt19937_64& rng, std::size_t len,
                                         double lo = -1e6, double hi = 1e6) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> out(len);
  for (auto& v : out) v = dist(rng);
  return out;
}

inline double max_abs(const std::vector<double>& x, std::size_t first, std::size_t last) {
  double m = 0.0;
  for (std::size_t j = first; j <= last; ++j) m = std::max(m, std::abs(x[j]));
  return m;
}

}  // namespace oracle
