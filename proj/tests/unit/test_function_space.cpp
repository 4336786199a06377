#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <numbers>
#include <sstream>

#include "mpsg/errors.hpp"
#include "mpsg/grid.hpp"
#include "mpsg/samples.hpp"
#include "mpsg/semigroup.hpp"

using namespace mpsg;

namespace {

const double kNegInf = -std::numeric_limits<double>::infinity();

GridFunction identity_fn(const Grid& g) {
  return GridFunction::sample(g, [](double x) { return x; });
}

}  // namespace

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(Grid(1.0, 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(Grid(0.0, 1.0, 1), std::invalid_argument);
  const Grid g(0.0, 1.0, 4);
  CHECK(g.dx() == 0.25);
  CHECK(g.x(0) == 0.125);
  CHECK(g.refined(2).n() == 8);
  CHECK_THROWS_AS(GridFunction(g, std::vector<double>(3, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(GridFunction(g, {0.0, std::nan(""), 0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(GridFunction(g, {0.0, -kNegInf, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("pw_oplus") {
  const Grid g(-1.0, 1.0, 16);
  const auto one = GridFunction::constant(g, 1.0);
  CHECK(pw_oplus(one, GridFunction::bottom(g)) == one);
  const auto f = identity_fn(g);
  const auto neg = GridFunction::sample(g, [](double x) { return -x; });
  const auto h = pw_oplus(f, neg);
  for (std::size_t i = 0; i < g.n(); ++i) CHECK(h.value(i) == std::abs(g.x(i)));
  CHECK(pw_oplus(f, f) == f);
  CHECK_THROWS_AS(pw_oplus(f, GridFunction::constant(Grid(-1.0, 1.0, 8), 0.0)), GridMismatch);
}

TEST_CASE("pw_otimes") {
  const Grid g(0.0, 1.0, 8);
  const auto f = identity_fn(g);
  CHECK(pw_otimes(MaxScalar(0.0), f) == f);
  CHECK(pw_otimes(MaxScalar::bottom(), f).is_all_bottom());
  CHECK(pw_otimes(MaxScalar(2.0), GridFunction::constant(g, 3.0)) == GridFunction::constant(g, 5.0));
  CHECK(pw_otimes(MaxScalar(4.0), GridFunction::bottom(g)).is_all_bottom());
}

TEST_CASE("lattice_decompose") {
  const Grid g(-1.0, 1.0, 20);
  {
    const auto p = lattice_decompose(GridFunction::constant(g, -2.0));
    CHECK(p.pos == GridFunction::constant(g, 0.0));
    CHECK(p.neg == GridFunction::constant(g, 2.0));
    CHECK(p.abs == GridFunction::constant(g, 2.0));
  }
  {
    const auto p = lattice_decompose(GridFunction::constant(g, 3.0));
    CHECK(p.pos == GridFunction::constant(g, 3.0));
    CHECK(p.neg == GridFunction::constant(g, 0.0));
    CHECK(p.abs == GridFunction::constant(g, 3.0));
  }
  const auto p = lattice_decompose(identity_fn(g));
  for (std::size_t i = 0; i < g.n(); ++i) {
    const double x = g.x(i);
    CHECK(p.pos.value(i) == std::max(x, 0.0));
    CHECK(p.neg.value(i) == std::max(-x, 0.0));
    CHECK(p.abs.value(i) == std::abs(x));
  }
  std::vector<double> v(20, 1.0);
  v[3] = kNegInf;
  CHECK_THROWS_AS(lattice_decompose(GridFunction(g, v)), BottomValueError);
}

TEST_CASE("norms") {
  CHECK(norm_l1(GridFunction::constant(Grid(0.0, 1.0, 10), 1.0)) == Catch::Approx(1.0).epsilon(1e-15));
  CHECK(norm_l1(GridFunction::constant(Grid(0.0, 1.0, 10), 0.0)) == 0.0);
  {
    const Grid g(0.0, 1.0, 1000);
    CHECK(std::abs(norm_l1(identity_fn(g)) - 0.5) <= g.dx());
  }
  CHECK(norm_sup(GridFunction::constant(Grid(0.0, 1.0, 10), -3.0)) == 3.0);
  CHECK(norm_sup(GridFunction::constant(Grid(0.0, 1.0, 10), 0.0)) == 0.0);
  {
    const Grid g(0.0, 2.0 * std::numbers::pi, 4096);
    const auto s = GridFunction::sample(g, [](double x) { return std::sin(x); });
    double oracle = 0.0;
    for (std::size_t i = 0; i < g.n(); ++i) oracle = std::max(oracle, std::abs(std::sin(g.x(i))));
    CHECK(norm_sup(s) == oracle);
    CHECK(norm_sup(s) == Catch::Approx(1.0).margin(1e-6));
  }
  CHECK_THROWS_AS(norm_sup(GridFunction::bottom(Grid(0.0, 1.0, 4))), BottomValueError);
}

TEST_CASE("dist and the max identity") {
  const Grid g(-2.0, 2.0, 257);
  CHECK(dist(GridFunction::constant(g, 1.0), GridFunction::constant(g, -1.0), Norm::Sup) == 2.0);
  SampleGenerator gen(3);
  for (int k = 0; k < 50; ++k) {
    const auto [f, h] = gen.pair(g);
    CHECK(dist(f, f, Norm::L1) == 0.0);
    for (Norm n : {Norm::L1, Norm::Sup}) CHECK(dist(f, h, n) == dist_via_max(f, h, n));
    // |f - h| = 2 (f (+) h) - f - h, cell by cell.
    const auto m = pw_oplus(f, h);
    for (std::size_t i = 0; i < g.n(); ++i) {
      const double direct = std::abs(f.value(i) - h.value(i));
      const double via = (m.value(i) - f.value(i)) + (m.value(i) - h.value(i));
      REQUIRE(direct == via);
    }
  }
}

TEST_CASE("lip_seminorm_estimate on simple operators") {
  const Grid g(0.0, 2.0 * std::numbers::pi, 128, true);
  SampleGenerator gen(5);
  const auto pairs = gen.pairs(g, 16);
  CHECK(lip_seminorm_estimate(identity_semigroup(), 0.0, pairs, Norm::Sup) == 1.0);
  CHECK(lip_seminorm_estimate(identity_semigroup(), 0.7, pairs, Norm::L1) == 1.0);
  const auto left = make_translation(Direction::Left);
  CHECK(lip_seminorm_estimate(left, 3.0 * g.dx(), pairs, Norm::Sup) == 1.0);
  std::vector<FunctionPair> same{{pairs[0].first, pairs[0].first}};
  CHECK_THROWS_AS(lip_seminorm_estimate(left, 0.1, same, Norm::Sup), std::invalid_argument);
}

TEST_CASE("grid function text round trip") {
  SampleGenerator gen(9);
  for (const Grid& g : {Grid(-1.0, 3.0, 37, true), Grid(Axis{0.0, 1.0, 5, false}, Axis{-2.0, 2.0, 7, true})}) {
    for (int k = 0; k < 20; ++k) {
      const auto f = gen.function(g);
      std::stringstream s;
      write_grid_function(s, f);
      const auto back = read_grid_function(s);
      REQUIRE(back == f);
      for (std::size_t i = 0; i < f.size(); ++i)
        REQUIRE(std::memcmp(&f.values()[i], &back.values()[i], sizeof(double)) == 0);
    }
  }
  const Grid g(0.0, 1.0, 4);
  const GridFunction with_bottom(g, {1.0, kNegInf, 0.5, kNegInf});
  const auto path = std::filesystem::temp_directory_path() / "mpsg_roundtrip.txt";
  write_grid_function(path, with_bottom);
  CHECK(read_grid_function(path) == with_bottom);
  std::filesystem::remove(path);
}

TEST_CASE("malformed grid function files name the line") {
  std::istringstream short_file("grid 0 1 10 0\n1 2 3 4 5\n6 7 8 9\n");
  try {
    read_grid_function(short_file);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() >= 1);
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
  std::istringstream bad_token("grid 0 1 2 0\n1 nan\n");
  try {
    read_grid_function(bad_token);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream bad_header("grid 0 1\n1 2\n");
  CHECK_THROWS_AS(read_grid_function(bad_header), ParseError);
}

TEST_CASE("seeded samples are reproducible") {
  const Grid g(-4.0, 4.0, 64);
  SampleGenerator a(42), b(42), c(43);
  for (int k = 0; k < 6; ++k) {
    const auto fa = a.function(g);
    CHECK(fa == b.function(g));
    CHECK_FALSE(fa == c.function(g));
  }
  SampleGenerator o(1);
  for (const auto& [f, h] : o.ordered_pairs(g, 10)) CHECK(precedes(f, h));
}
