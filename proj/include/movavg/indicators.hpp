#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "movavg/frame.hpp"

namespace movavg {

// Batch averages. Output has one slot per input; slots before the first full
// window, and windows containing an undefined input, hold kUndefined.
std::vector<double> sma(std::span<const double> values, int period);
std::vector<double> wma(std::span<const double> values, int period);
std::vector<double> ema(std::span<const double> values, int period);

/// Linear weights 1..n normalized to sum to 1, oldest to newest.
std::vector<double> wma_weights(int period);

/// Truncated geometric weights proportional to (1-q)^i with q = 2/(n+1),
/// newest (i = 0) to oldest, normalized to sum to 1.
std::vector<double> ema_weights(int period);

/// Smoothing factor 2/(n+1).
double ema_smoothing(int period);

IndicatorSeries compute_indicator(const TimeSeriesFrame& frame,
                                  const IndicatorSpec& spec);

namespace detail {

// Fixed-capacity window over the most recent pushes. Undefined values occupy
// a slot but are excluded from min/max tracking and counted separately.
class SlidingWindow {
 public:
  explicit SlidingWindow(int period);

  // Returns the evicted value, or nothing while the window is filling.
  std::optional<double> push(double value);

  std::size_t size() const noexcept { return size_; }
  std::size_t capacity() const noexcept { return slots_.size(); }
  bool full() const noexcept { return size_ == slots_.size(); }
  std::size_t undefined_count() const noexcept { return undefined_; }
  double min() const noexcept { return min_.front().value; }
  double max() const noexcept { return max_.front().value; }

  // i = 0 is the oldest value currently held.
  double at(std::size_t i) const noexcept {
    return slots_[(head_ + i) % slots_.size()];
  }

 private:
  struct Tagged {
    std::uint64_t seq;
    double value;
  };

  std::vector<double> slots_;
  std::size_t head_ = 0;
  std::size_t size_ = 0;
  std::size_t undefined_ = 0;
  std::uint64_t seq_ = 0;
  std::deque<Tagged> min_;
  std::deque<Tagged> max_;
};

}  // namespace detail

// Streaming states. push() returns the average after consuming `value`, or
// kUndefined while warming up. Feeding a series through push() reproduces the
// batch functions bit for bit.

class SmaState {
 public:
  explicit SmaState(int period);
  double push(double value);
  int period() const noexcept { return period_; }

 private:
  void resum();

  int period_;
  detail::SlidingWindow window_;
  double sum_ = 0.0;
  std::size_t since_resum_ = 0;
};

class WmaState {
 public:
  explicit WmaState(int period);
  double push(double value);
  int period() const noexcept { return period_; }

 private:
  void resum();

  int period_;
  double denominator_;
  detail::SlidingWindow window_;
  double sum_ = 0.0;       // plain sum of window contents
  double weighted_ = 0.0;  // sum of (position + 1) * value, oldest first
  std::size_t since_resum_ = 0;
};

class EmaState {
 public:
  explicit EmaState(int period);
  double push(double value);
  int period() const noexcept { return period_; }
  double smoothing() const noexcept { return q_; }
  double current() const noexcept { return current_; }

 private:
  int period_;
  double q_;
  double seed_sum_ = 0.0;
  int seed_count_ = 0;
  double seed_min_ = 0.0;
  double seed_max_ = 0.0;
  double current_ = kUndefined;
};

inline SmaState make_sma_state(int period) { return SmaState(period); }
inline WmaState make_wma_state(int period) { return WmaState(period); }
inline EmaState make_ema_state(int period) { return EmaState(period); }

}  // namespace movavg
