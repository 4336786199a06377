#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "mpsg/errors.hpp"
#include "mpsg/max_scalar.hpp"

using namespace mpsg;

namespace {
const double kInf = std::numeric_limits<double>::infinity();
const MaxScalar kBot = MaxScalar::bottom();
}  // namespace

TEST_CASE("oplus is max with bottom neutral") {
  CHECK(oplus(MaxScalar(3.0), kBot) == MaxScalar(3.0));
  CHECK(oplus(kBot, MaxScalar(3.0)) == MaxScalar(3.0));
  CHECK(oplus(MaxScalar(2.0), MaxScalar(2.0)) == MaxScalar(2.0));
  CHECK(oplus(MaxScalar(-1.5), MaxScalar(0.25)) == MaxScalar(0.25));
  CHECK(oplus(kBot, kBot).is_bottom());
}

TEST_CASE("otimes is addition with bottom absorbing") {
  CHECK(otimes(MaxScalar(2.0), MaxScalar(3.0)) == MaxScalar(5.0));
  CHECK(otimes(MaxScalar(7.0), kBot).is_bottom());
  CHECK(otimes(kBot, MaxScalar(7.0)).is_bottom());
  CHECK(otimes(MaxScalar(0.0), MaxScalar(-4.5)) == MaxScalar(-4.5));
  CHECK_THROWS_AS(otimes(MaxScalar(1e308), MaxScalar(1e308)), std::overflow_error);
}

TEST_CASE("leq is the order induced by oplus") {
  CHECK(leq(kBot, MaxScalar(-7.0)));
  CHECK(leq(MaxScalar(3.0), MaxScalar(3.0)));
  CHECK_FALSE(leq(MaxScalar(4.0), MaxScalar(1.0)));
  CHECK_FALSE(leq(MaxScalar(-1e300), kBot));
}

TEST_CASE("construction rejects NaN and +inf") {
  CHECK_THROWS_AS(MaxScalar(std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(MaxScalar(kInf), std::invalid_argument);
  CHECK(MaxScalar(-kInf).is_bottom());
  CHECK(MaxScalar().is_bottom());
  CHECK(MaxScalar::unit() == MaxScalar(0.0));
}

TEST_CASE("bottom is distinguishable from every finite value") {
  const MaxScalar lowest(std::numeric_limits<double>::lowest());
  CHECK(lowest.is_finite());
  CHECK_FALSE(lowest == kBot);
  CHECK(leq(kBot, lowest));
  CHECK_THROWS_AS(kBot.finite_value(), BottomValueError);
  CHECK(lowest.finite_value() == std::numeric_limits<double>::lowest());
}

TEST_CASE("text round trip is bit exact") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    double v;
    const std::uint64_t bits = rng();
    std::memcpy(&v, &bits, sizeof v);
    if (!std::isfinite(v)) continue;
    const MaxScalar a(v);
    const MaxScalar b = parse_max_scalar(to_string(a));
    CHECK(std::memcmp(&v, &b, sizeof v) == 0);
  }
  CHECK(to_string(kBot) == "-inf");
  CHECK(parse_max_scalar("-inf").is_bottom());
  CHECK(to_string(MaxScalar(0.1)) == "0.1");
  for (const char* bad : {"inf", "+inf", "nan", "", "1x", "--1", " 1"}) {
    CHECK_THROWS_AS(parse_max_scalar(bad), std::invalid_argument);
  }
}

TEST_CASE("semifield laws on random scalars") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  auto draw = [&] { return (rng() % 8 == 0) ? kBot : MaxScalar(std::ldexp(std::round(std::ldexp(u(rng), 10)), -10)); };
  for (int i = 0; i < 5000; ++i) {
    const MaxScalar a = draw(), b = draw(), c = draw();
    REQUIRE(oplus(a, b) == oplus(b, a));
    REQUIRE(oplus(oplus(a, b), c) == oplus(a, oplus(b, c)));
    REQUIRE(oplus(a, a) == a);
    REQUIRE(otimes(a, b) == otimes(b, a));
    // Dyadic draws keep + exact, so associativity and distributivity are bit exact.
    REQUIRE(otimes(otimes(a, b), c) == otimes(a, otimes(b, c)));
    REQUIRE(otimes(a, oplus(b, c)) == oplus(otimes(a, b), otimes(a, c)));
    REQUIRE(leq(a, oplus(a, b)));
    REQUIRE((leq(a, b) && leq(b, a)) == (a == b));
  }
}
