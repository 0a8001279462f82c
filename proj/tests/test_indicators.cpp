#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "movavg/error.hpp"
#include "movavg/indicators.hpp"
#include "movavg/ingest.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace movavg;

namespace {

// Expected values below come from hand arithmetic over the Table 2 Close
// column (22.65, 22.1, 22.9, 22.0):
//   SMA(3)[2] = (22.65 + 22.1 + 22.9) / 3            = 22.55
//   WMA(3)[2] = (1*22.65 + 2*22.1 + 3*22.9) / 6      = 135.55 / 6
//   EMA(3)    q = 0.5, seed 22.55, then 0.5*22.0 + 0.5*22.55 = 22.275
constexpr double kSma3 = 22.55;
constexpr double kWma3 = 135.55 / 6.0;
constexpr double kEma3Next = 22.275;

bool undefined(double v) { return std::isnan(v); }

bool bit_equal(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

}  // namespace

TEST_CASE("sma examples") {
  const auto out = sma(std::vector{22.65, 22.1, 22.9}, 3);
  REQUIRE(out.size() == 3);
  CHECK(undefined(out[0]));
  CHECK(undefined(out[1]));
  CHECK(out[2] == doctest::Approx(kSma3).epsilon(1e-12));

  const auto constant = sma(std::vector{5.0, 5.0, 5.0, 5.0}, 2);
  CHECK(undefined(constant[0]));
  CHECK(constant[1] == 5.0);
  CHECK(constant[3] == 5.0);

  CHECK(sma(std::vector{7.0, 9.0, -3.0}, 1) == std::vector{7.0, 9.0, -3.0});
}

TEST_CASE("wma weights") {
  const auto w3 = wma_weights(3);
  REQUIRE(w3.size() == 3);
  CHECK(w3[0] == doctest::Approx(1.0 / 6).epsilon(1e-15));
  CHECK(w3[1] == doctest::Approx(2.0 / 6).epsilon(1e-15));
  CHECK(w3[2] == doctest::Approx(3.0 / 6).epsilon(1e-15));
  CHECK(wma_weights(1) == std::vector{1.0});
  const auto w2 = wma_weights(2);
  CHECK(w2[0] == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(w2[1] == doctest::Approx(2.0 / 3).epsilon(1e-15));
}

TEST_CASE("wma examples") {
  const auto out = wma(std::vector{22.65, 22.1, 22.9}, 3);
  CHECK(undefined(out[0]));
  CHECK(undefined(out[1]));
  CHECK(out[2] == doctest::Approx(kWma3).epsilon(1e-12));
  CHECK(out[2] == doctest::Approx(22.59167).epsilon(1e-6));

  const auto constant = wma(std::vector{4.0, 4.0, 4.0}, 3);
  CHECK(constant[2] == 4.0);

  const std::vector x{1.25, -3.5, 8.0, 0.0, 2.0};
  CHECK(wma(x, 1) == x);
}

TEST_CASE("ema examples") {
  const auto out = ema(std::vector{22.65, 22.1, 22.9, 22.0}, 3);
  CHECK(undefined(out[0]));
  CHECK(undefined(out[1]));
  CHECK(out[2] == doctest::Approx(kSma3).epsilon(1e-12));
  CHECK(std::abs(out[3] - kEma3Next) <= 1e-9);

  const auto constant = ema(std::vector{6.0, 6.0, 6.0, 6.0, 6.0}, 3);
  CHECK(undefined(constant[1]));
  for (std::size_t i = 2; i < 5; ++i) CHECK(constant[i] == 6.0);

  CHECK(ema(std::vector{3.0, 8.0, 1.0}, 1) == std::vector{3.0, 8.0, 1.0});
  CHECK(ema_smoothing(3) == 0.5);
  CHECK(ema_smoothing(1) == 1.0);
}

TEST_CASE("ema weights") {
  CHECK(ema_weights(1) == std::vector{1.0});
  const auto w = ema_weights(3);
  REQUIRE(w.size() == 3);
  CHECK(w[0] == doctest::Approx(4.0 / 7).epsilon(1e-15));
  CHECK(w[1] == doctest::Approx(2.0 / 7).epsilon(1e-15));
  CHECK(w[2] == doctest::Approx(1.0 / 7).epsilon(1e-15));
}

TEST_CASE("non-positive periods are rejected everywhere") {
  const std::vector x{1.0, 2.0};
  for (int n : {0, -1}) {
    CHECK_THROWS_AS(sma(x, n), Error);
    CHECK_THROWS_AS(wma(x, n), Error);
    CHECK_THROWS_AS(ema(x, n), Error);
    CHECK_THROWS_AS(wma_weights(n), Error);
    CHECK_THROWS_AS(ema_weights(n), Error);
    CHECK_THROWS_AS(SmaState{n}, Error);
    CHECK_THROWS_AS(WmaState{n}, Error);
    CHECK_THROWS_AS(EmaState{n}, Error);
  }
}

TEST_CASE("empty input and periods longer than the series") {
  CHECK(sma(std::vector<double>{}, 3).empty());
  const auto out = ema(std::vector{1.0, 2.0}, 5);
  CHECK(out.size() == 2);
  CHECK(std::all_of(out.begin(), out.end(), undefined));
}

TEST_CASE("undefined inputs") {
  const double nan = kUndefined;
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector x{1.0, 2.0, nan, 4.0, 5.0, 6.0, inf, 8.0, 9.0, 10.0};

  SUBCASE("windows containing a gap are undefined for sma and wma") {
    for (auto fn : {&sma, &wma}) {
      const auto out = fn(x, 2);
      CHECK(!undefined(out[1]));
      CHECK(undefined(out[2]));
      CHECK(undefined(out[3]));
      CHECK(!undefined(out[4]));
      CHECK(undefined(out[6]));
      CHECK(undefined(out[7]));
      CHECK(!undefined(out[8]));
    }
    CHECK(sma(x, 2)[4] == 4.5);
    CHECK(wma(x, 2)[9] == doctest::Approx((9.0 + 2 * 10.0) / 3).epsilon(1e-15));
  }

  SUBCASE("ema reseeds over the next n defined values after a gap") {
    const auto out = ema(x, 2);
    CHECK(!undefined(out[1]));
    CHECK(undefined(out[2]));
    CHECK(undefined(out[3]));             // one defined value after the gap
    CHECK(out[4] == 4.5);                 // seed = mean(4, 5)
    CHECK(out[5] == doctest::Approx(2.0 / 3 * 6 + 1.0 / 3 * 4.5));
    CHECK(undefined(out[6]));             // infinity counts as a gap
    CHECK(undefined(out[7]));
    CHECK(out[8] == 8.5);
  }
}

TEST_CASE("streaming states echo their input when n = 1") {
  SmaState s(1);
  WmaState w(1);
  EmaState e(1);
  for (double v : {3.0, -1.5, 1e300, 0.0}) {
    CHECK(s.push(v) == v);
    CHECK(w.push(v) == v);
    CHECK(e.push(v) == v);
  }
}

TEST_CASE("streaming sma example") {
  auto state = make_sma_state(3);
  CHECK(undefined(state.push(22.65)));
  CHECK(undefined(state.push(22.1)));
  CHECK(state.push(22.9) == doctest::Approx(kSma3).epsilon(1e-12));
}

TEST_CASE("streaming matches batch on 10,000 random values") {
  std::mt19937_64 rng(2024);
  const auto x = oracle::random_series(rng, 10'000);
  for (int n : {1, 2, 7, 50, 333}) {
    CAPTURE(n);
    SmaState s(n);
    WmaState w(n);
    EmaState e(n);
    const auto bs = sma(x, n), bw = wma(x, n), be = ema(x, n);
    for (std::size_t i = 0; i < x.size(); ++i) {
      REQUIRE(bit_equal(s.push(x[i]), bs[i]));
      REQUIRE(bit_equal(w.push(x[i]), bw[i]));
      REQUIRE(bit_equal(e.push(x[i]), be[i]));
    }
  }
}

TEST_CASE("batch sma/wma agree with per-window recomputation") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> period(1, 50);
  std::uniform_int_distribution<std::size_t> length(0, 500);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = period(rng);
    const auto x = oracle::random_series(rng, length(rng));
    const auto fs = sma(x, n), fw = wma(x, n);
    const auto os = oracle::sma(x, n), ow = oracle::wma(x, n);
    for (std::size_t i = 0; i < x.size(); ++i) {
      REQUIRE(undefined(fs[i]) == undefined(os[i]));
      if (undefined(os[i])) continue;
      const double scale = oracle::max_abs(x, i + 1 - n, i);
      REQUIRE(std::abs(fs[i] - os[i]) <= 1e-9 * scale);
      REQUIRE(std::abs(fw[i] - ow[i]) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("ema agrees with its geometric-weight expansion") {
  std::mt19937_64 rng(5);
  for (int n : {1, 2, 3, 10, 30}) {
    const auto x = oracle::random_series(rng, 200, -100.0, 100.0);
    const auto got = ema(x, n);
    const auto want = oracle::ema(x, n);
    for (std::size_t i = 0; i < x.size(); ++i) {
      REQUIRE(undefined(got[i]) == undefined(want[i]));
      if (!undefined(want[i])) CHECK(std::abs(got[i] - want[i]) <= 1e-9 * 100.0);
    }
  }
}

TEST_CASE("consecutive ema weights decay by 1 - q") {
  for (int n : {2, 5, 20}) {
    const auto w = ema_weights(n);
    const double r = (n - 1.0) / (n + 1.0);
    for (std::size_t i = 1; i < w.size(); ++i) {
      CHECK(w[i] / w[i - 1] == doctest::Approx(r).epsilon(1e-12));
    }
  }
}

TEST_CASE("weights sum to one") {
  for (int n = 1; n <= 2000; ++n) {
    double sw = 0.0, se = 0.0;
    for (double v : wma_weights(n)) sw += v;
    for (double v : ema_weights(n)) se += v;
    REQUIRE(std::abs(sw - 1.0) <= 1e-12);
    REQUIRE(std::abs(se - 1.0) <= 1e-12);
  }
}

TEST_CASE("compute_indicator dispatches over a frame column") {
  const auto frame = load_csv_text(support::table2_csv());
  const auto s = compute_indicator(frame, {IndicatorKind::sma, 3, "Close"});
  CHECK(s.values.size() == frame.row_count());
  CHECK(s.warmup_len == 2);
  CHECK(s.values[2] == doctest::Approx(kSma3).epsilon(1e-12));
  CHECK(s.spec.label() == "SMA(3)");

  const auto e = compute_indicator(frame, {IndicatorKind::ema, 1, "Close"});
  const auto close = frame.column("Close");
  CHECK(std::equal(close.begin(), close.end(), e.values.begin()));
  CHECK(e.warmup_len == 0);

  try {
    compute_indicator(frame, {IndicatorKind::wma, 3, "Missing"});
    FAIL("expected unknown-column");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::unknown_column);
  }
  CHECK_THROWS_AS(compute_indicator(frame, {IndicatorKind::sma, 0, "Close"}), Error);

  const auto long_period = compute_indicator(frame, {IndicatorKind::wma, 100, "Close"});
  CHECK(long_period.warmup_len == frame.row_count());
}

TEST_CASE("properties on random series") {
  std::mt19937_64 rng(31337);
  std::uniform_int_distribution<int> period(1, 40);
  std::uniform_int_distribution<std::size_t> length(1, 300);
  using Fn = std::vector<double> (*)(std::span<const double>, int);
  const Fn kinds[] = {&sma, &wma, &ema};

  for (int trial = 0; trial < 100; ++trial) {
    const int n = period(rng);
    const auto x = oracle::random_series(rng, length(rng), -1e3, 1e3);
    for (Fn fn : kinds) {
      const auto out = fn(x, n);
      // Output lies within the range of the inputs that produced it.
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (undefined(out[i])) continue;
        const std::size_t first = fn == &ema ? 0 : i + 1 - n;
        const auto [lo, hi] = std::minmax_element(x.begin() + first, x.begin() + i + 1);
        REQUIRE(*lo <= out[i]);
        REQUIRE(out[i] <= *hi);
      }
    }
    const std::vector<double> flat(x.size(), x[0]);
    for (Fn fn : kinds) {
      for (double v : fn(flat, n)) {
        if (!undefined(v)) REQUIRE(v == x[0]);
      }
    }
  }
}
