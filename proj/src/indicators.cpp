#include "movavg/indicators.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "movavg/error.hpp"

namespace movavg {

namespace {

void check_period(int period) {
  if (period < 1) {
    throw Error(ErrorCode::invalid_period,
                fmt::format("period must be a positive integer, got {}", period));
  }
}

double clamp_to(double value, double lo, double hi) {
  return std::min(std::max(value, lo), hi);
}

template <typename State>
std::vector<double> run(std::span<const double> values, int period) {
  State state(period);
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(state.push(v));
  return out;
}

}  // namespace

namespace detail {

SlidingWindow::SlidingWindow(int period) {
  check_period(period);
  slots_.assign(static_cast<std::size_t>(period), kUndefined);
}

std::optional<double> SlidingWindow::push(double value) {
  std::optional<double> evicted;
  const std::size_t cap = slots_.size();
  if (size_ == cap) {
    evicted = slots_[head_];
    if (!is_defined(*evicted)) --undefined_;
    slots_[head_] = value;
    head_ = (head_ + 1) % cap;
  } else {
    slots_[(head_ + size_) % cap] = value;
    ++size_;
  }

  const std::uint64_t seq = seq_++;
  if (is_defined(value)) {
    while (!min_.empty() && min_.back().value >= value) min_.pop_back();
    min_.push_back({seq, value});
    while (!max_.empty() && max_.back().value <= value) max_.pop_back();
    max_.push_back({seq, value});
  } else {
    ++undefined_;
  }
  // Drop extremes that slid out of the window.
  const std::uint64_t oldest = seq_ > cap ? seq_ - cap : 0;
  while (!min_.empty() && min_.front().seq < oldest) min_.pop_front();
  while (!max_.empty() && max_.front().seq < oldest) max_.pop_front();
  return evicted;
}

}  // namespace detail

// The running sums are rebuilt from the window every `period` pushes, which
// bounds accumulated rounding error at amortized O(1) cost per push.

SmaState::SmaState(int period) : period_(period), window_(period) {}

void SmaState::resum() {
  sum_ = 0.0;
  for (std::size_t i = 0; i < window_.size(); ++i) {
    const double v = window_.at(i);
    if (is_defined(v)) sum_ += v;
  }
  since_resum_ = 0;
}

double SmaState::push(double value) {
  if (!is_defined(value)) value = kUndefined;
  const auto evicted = window_.push(value);
  if (evicted && is_defined(*evicted)) sum_ -= *evicted;
  if (is_defined(value)) sum_ += value;
  if (++since_resum_ >= static_cast<std::size_t>(period_)) resum();

  if (!window_.full() || window_.undefined_count() > 0) return kUndefined;
  return clamp_to(sum_ / period_, window_.min(), window_.max());
}

WmaState::WmaState(int period)
    : period_(period),
      denominator_(static_cast<double>(period) * (period + 1.0) / 2.0),
      window_(period) {}

void WmaState::resum() {
  sum_ = 0.0;
  weighted_ = 0.0;
  for (std::size_t i = 0; i < window_.size(); ++i) {
    const double v = window_.at(i);
    if (!is_defined(v)) continue;
    sum_ += v;
    weighted_ += static_cast<double>(i + 1) * v;
  }
  since_resum_ = 0;
}

double WmaState::push(double value) {
  if (!is_defined(value)) value = kUndefined;
  const double x = is_defined(value) ? value : 0.0;
  if (window_.full()) {
    // Every held value loses one unit of weight; the newcomer takes weight n.
    const double oldest = window_.at(0);
    weighted_ = weighted_ - sum_ + period_ * x;
    sum_ = sum_ - (is_defined(oldest) ? oldest : 0.0) + x;
    window_.push(value);
  } else {
    weighted_ += static_cast<double>(window_.size() + 1) * x;
    sum_ += x;
    window_.push(value);
  }
  if (++since_resum_ >= static_cast<std::size_t>(period_)) resum();

  if (!window_.full() || window_.undefined_count() > 0) return kUndefined;
  return clamp_to(weighted_ / denominator_, window_.min(), window_.max());
}

EmaState::EmaState(int period) : period_(period), q_(0.0) {
  check_period(period);
  q_ = ema_smoothing(period);
}

double EmaState::push(double value) {
  if (!is_defined(value)) {
    // A gap invalidates the recursion; reseed over the next n defined values.
    seed_sum_ = 0.0;
    seed_count_ = 0;
    current_ = kUndefined;
    return kUndefined;
  }
  if (!is_defined(current_)) {
    seed_min_ = seed_count_ == 0 ? value : std::min(seed_min_, value);
    seed_max_ = seed_count_ == 0 ? value : std::max(seed_max_, value);
    seed_sum_ += value;
    if (++seed_count_ < period_) return kUndefined;
    current_ = clamp_to(seed_sum_ / period_, seed_min_, seed_max_);
    seed_sum_ = 0.0;
    seed_count_ = 0;
    return current_;
  }
  const double next = q_ * value + (1.0 - q_) * current_;
  current_ = clamp_to(next, std::min(value, current_), std::max(value, current_));
  return current_;
}

std::vector<double> sma(std::span<const double> values, int period) {
  return run<SmaState>(values, period);
}

std::vector<double> wma(std::span<const double> values, int period) {
  return run<WmaState>(values, period);
}

std::vector<double> ema(std::span<const double> values, int period) {
  return run<EmaState>(values, period);
}

double ema_smoothing(int period) {
  check_period(period);
  return 2.0 / (period + 1.0);
}

std::vector<double> wma_weights(int period) {
  check_period(period);
  const double total = static_cast<double>(period) * (period + 1.0) / 2.0;
  std::vector<double> weights(static_cast<std::size_t>(period));
  for (int i = 0; i < period; ++i) weights[i] = (i + 1.0) / total;
  return weights;
}

std::vector<double> ema_weights(int period) {
  check_period(period);
  // 1 - q = (n - 1) / (n + 1); normalizing by the sum of the powers is the
  // same as dividing q(1-q)^i by 1 - (1-q)^n.
  const double decay = (period - 1.0) / (period + 1.0);
  std::vector<double> weights(static_cast<std::size_t>(period));
  double total = 0.0;
  double compensation = 0.0;
  for (int i = 0; i < period; ++i) {
    weights[i] = std::pow(decay, i);
    const double t = total + weights[i];
    compensation += std::abs(total) >= std::abs(weights[i])
                        ? (total - t) + weights[i]
                        : (weights[i] - t) + total;
    total = t;
  }
  total += compensation;
  for (double& w : weights) w /= total;
  return weights;
}

IndicatorSeries compute_indicator(const TimeSeriesFrame& frame,
                                  const IndicatorSpec& spec) {
  check_period(spec.period);
  const auto source = frame.column(spec.source_column);
  IndicatorSeries series{spec, {}, 0};
  switch (spec.kind) {
    case IndicatorKind::sma: series.values = sma(source, spec.period); break;
    case IndicatorKind::wma: series.values = wma(source, spec.period); break;
    case IndicatorKind::ema: series.values = ema(source, spec.period); break;
  }
  series.warmup_len =
      std::min(static_cast<std::size_t>(spec.period - 1), series.values.size());
  return series;
}

}  // namespace movavg
