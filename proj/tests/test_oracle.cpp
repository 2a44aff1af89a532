#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cantor/errors.hpp"
#include "cantor/oracle.hpp"

using namespace cantor;

namespace {

using ExactFn = std::function<Rational(const Rational&, const Rational&)>;
using RationalPart = std::pair<Rational, Rational>;

// Exact union of the images of all rank-n squares for a function increasing
// in both variables on [0,1]^2.
std::vector<RationalPart> exact_cover(const ExactFn& f, unsigned n) {
  std::vector<RationalPart> images;
  const auto ivs = intervals_of_rank(n, Interval(0, 1));
  for (const auto& a : ivs)
    for (const auto& b : ivs)
      images.emplace_back(f(a.left().to_rational(), b.left().to_rational()),
                          f(a.right().to_rational(), b.right().to_rational()));
  std::sort(images.begin(), images.end());
  std::vector<RationalPart> out;
  for (const auto& im : images) {
    if (!out.empty() && im.first <= out.back().second)
      out.back().second = std::max(out.back().second, im.second);
    else
      out.push_back(im);
  }
  return out;
}

Rational measure(const std::vector<RationalPart>& parts) {
  Rational m = 0;
  for (const auto& p : parts) m += p.second - p.first;
  return m;
}

BasicSquare square(const std::string& xw, const std::string& yw) {
  return BasicSquare(word_to_interval(TernaryWord::parse(xw)), word_to_interval(TernaryWord::parse(yw)));
}

Certificate certify_or_fail(const std::string& text, const BasicSquare& sq) {
  const CertifyResult r = certify_square(differentiate(parse(text)), sq);
  REQUIRE(std::holds_alternative<Certificate>(r));
  return std::get<Certificate>(r);
}

const std::vector<std::string> kFamily{"x^2*y", "x^2+y^2", "x^2-y^2", "x+y^2", "x-y^2", "sin(x)*cos(y)"};

}  // namespace

TEST_CASE("depth_cover examples") {
  const CoverReport one = depth_cover(parse("x*y"), 1);
  REQUIRE(one.cover.size() == 2);
  CHECK(one.cover.parts()[0].lo() == 0);
  CHECK(Rational(one.cover.parts()[0].hi()) >= Rational(1, 3));
  CHECK(one.cover.parts()[0].hi() - 1.0 / 3 < 1e-15);
  CHECK(Rational(one.cover.parts()[1].lo()) <= Rational(4, 9));
  CHECK(one.cover.parts()[1].hi() == 1);
  CHECK(one.measure == doctest::Approx(8.0 / 9).epsilon(1e-12));
  CHECK(one.squares_visited == 4);

  const CoverReport zero = depth_cover(parse("x*y"), 0);
  CHECK(zero.cover.parts() == std::vector<Interval>{Interval(0, 1)});
  CHECK(zero.measure == 1);

  for (unsigned n = 0; n <= 8; ++n) {
    const CoverReport s = depth_cover(parse("x+y"), n);
    INFO(n);
    REQUIRE(s.cover.size() == 1);
    CHECK(s.cover.parts()[0] == Interval(0, 2));
    CHECK(s.measure == 2);
  }

  CHECK_THROWS_AS(depth_cover(parse("1/x"), 2), DomainError);
  OracleOptions small;
  small.square_budget = 100;
  CHECK_THROWS_AS(depth_cover(parse("x*y"), 4, kUnitSquare, small), BudgetExceeded);
}

TEST_CASE("depth_cover matches an exact rational union") {
  const std::vector<std::pair<std::string, ExactFn>> fns{
      {"x*y", [](const Rational& x, const Rational& y) { return x * y; }},
      {"x+y", [](const Rational& x, const Rational& y) { return x + y; }},
      {"x^2+y", [](const Rational& x, const Rational& y) { return x * x + y; }},
      {"x*y+x", [](const Rational& x, const Rational& y) { return x * y + x; }},
  };
  for (const auto& [text, f] : fns) {
    for (unsigned n = 0; n <= 5; ++n) {
      const auto exact = exact_cover(f, n);
      const CoverReport rep = depth_cover(parse(text), n);
      INFO(text << " n=" << n);
      REQUIRE(rep.cover.size() == exact.size());
      for (std::size_t i = 0; i < exact.size(); ++i) {
        const Interval& p = rep.cover.parts()[i];
        CHECK(Rational(p.lo()) <= exact[i].first);
        CHECK(Rational(p.hi()) >= exact[i].second);
        CHECK(std::abs(p.lo() - static_cast<double>(exact[i].first)) < 1e-15);
        CHECK(std::abs(p.hi() - static_cast<double>(exact[i].second)) < 1e-15);
      }
      CHECK(std::abs(rep.measure - static_cast<double>(measure(exact))) < 1e-13);
    }
  }
}

TEST_CASE("cover_measure_series for the product") {
  const auto series = cover_measure_series(parse("x*y"), 10);
  REQUIRE(series.size() == 11);
  CHECK(series[0] == std::make_pair(0u, 1.0));
  CHECK(std::abs(series[1].second - 8.0 / 9) < 1e-12);
  for (std::size_t i = 0; i < series.size(); ++i) {
    CHECK(series[i].first == i);
    CHECK(series[i].second >= 17.0 / 21);
    if (i) CHECK(series[i].second <= series[i - 1].second);
  }
  // Regression constant from the oracle.
  CHECK(series[10].second == doctest::Approx(0.8095590984033892).epsilon(1e-12));

  const auto sum = cover_measure_series(parse("x+y"), 6);
  for (const auto& [n, m] : sum) CHECK(m == 2);
}

TEST_CASE("covers are nested") {
  for (const auto& text : kFamily) {
    const auto series = cover_series(parse(text), 8);
    for (std::size_t n = 1; n < series.size(); ++n) {
      const IntervalUnion outer = series[n - 1].cover.widened(4);
      bool nested = true;
      for (const auto& p : series[n].cover.parts()) nested = nested && subset_with_slack(p, outer, 0);
      INFO(text << " n=" << n);
      CHECK(nested);
    }
  }
}

TEST_CASE("depth_cover does not depend on the worker count") {
  OracleOptions two, eight;
  two.workers = 2;
  eight.workers = 8;
  const CoverReport a = depth_cover(parse("sin(x)*cos(y)"), 6);
  CHECK(depth_cover(parse("sin(x)*cos(y)"), 6, kUnitSquare, two).cover == a.cover);
  CHECK(depth_cover(parse("sin(x)*cos(y)"), 6, kUnitSquare, eight).cover == a.cover);
}

TEST_CASE("inner_samples examples") {
  const auto sums = inner_samples(parse("x+y"), BasicSquare(), 1);
  const std::vector<double> expected{0, 1.0 / 3, 2.0 / 3, 1, 4.0 / 3, 5.0 / 3, 2};
  REQUIRE(sums.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(sums[i] == doctest::Approx(expected[i]).epsilon(1e-15));

  const BasicSquare sq = square("LRR", "RLL");
  const auto products = inner_samples(parse("x*y"), sq, 3);
  REQUIRE(products.size() == 4);
  CHECK(products.front() == doctest::Approx(144.0 / 729).epsilon(1e-15));
  CHECK(products.back() == doctest::Approx(171.0 / 729).epsilon(1e-15));
  CHECK(products[1] == doctest::Approx(152.0 / 729).epsilon(1e-15));
  CHECK(products[2] == doctest::Approx(162.0 / 729).epsilon(1e-15));

  CHECK(inner_samples(parse("x*y"), sq, 5).size() == 8 * 8);
  CHECK_THROWS_AS(inner_samples(parse("x*y"), sq, 2), Error);
}

TEST_CASE("inner samples lie in the depth cover") {
  for (const auto& text : kFamily) {
    const Expr e = parse(text);
    const unsigned m = 6;
    const IntervalUnion cover = depth_cover(e, m).cover.widened(4);
    for (const auto& sq : squares_of_rank(1, kUnitSquare)) {
      bool ok = true;
      for (double v : inner_samples(e, sq, m)) ok = ok && subset_with_slack(Interval::point(v), cover, 0);
      INFO(text);
      CHECK(ok);
    }
  }
}

TEST_CASE("hit_test examples") {
  const Certificate xy = certify_or_fail("x*y", square("LRR", "RLL"));
  CHECK(hit_test(xy, parse("x*y"), 12, 1e-3));

  const Certificate sum = certify_or_fail("x+y", BasicSquare());
  CHECK(hit_test(sum, parse("x+y"), 10, 1e-2));

  // A fake certificate straddling the gap (1/3, 4/9) of every cover.
  Certificate fake = xy;
  fake.square = BasicSquare();
  fake.image = Interval(0.3, 0.45);
  CHECK_FALSE(hit_test(fake, parse("x*y"), 6, 1e-3));
}

TEST_CASE("refinement images and recursion") {
  const Certificate sum = certify_or_fail("x+y", BasicSquare());
  const GradTriple g = differentiate(parse("x+y"));
  const auto level0 = refinement_images(sum, g, 0);
  REQUIRE(level0.size() == 1);
  CHECK(level0[0] == Interval(0, 2));

  const auto level1 = refinement_images(sum, g, 1);
  REQUIRE(level1.size() == 4);
  const std::vector<std::pair<Rational, Rational>> expected{
      {0, Rational(2, 3)}, {Rational(2, 3), Rational(4, 3)}, {Rational(2, 3), Rational(4, 3)}, {Rational(4, 3), 2}};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(Rational(level1[i].lo()) <= expected[i].first);
    CHECK(Rational(level1[i].hi()) >= expected[i].second);
    CHECK(level1[i].width() - static_cast<double>(expected[i].second - expected[i].first) < 1e-15);
  }
  CHECK(refinement_images(sum, g, 3).size() == 64);

  CHECK(verify_recursion(sum, parse("x+y"), 0));
  CHECK(verify_recursion(sum, parse("x+y"), 1));
  CHECK(verify_recursion(sum, parse("x+y"), 6));

  const Certificate xy = certify_or_fail("x*y", square("LRR", "RLL"));
  CHECK(verify_recursion(xy, parse("x*y"), 8));
  CHECK(verify_recursion(xy, parse("x*y"), 0));

  Certificate broken = xy;
  broken.square = square("L", "R");
  CHECK_THROWS_AS(refinement_images(broken, differentiate(parse("x*y")), 1), ConditionLost);
}

TEST_CASE("certified images sit inside every depth cover") {
  for (const auto& text : kFamily) {
    const GradTriple g = differentiate(parse(text));
    const SearchOutcome out = search(g, SearchOptions{});
    REQUIRE(out.found());
    const Certificate& c = out.certificate();
    INFO(text);
    for (unsigned n = 1; n <= 8; ++n) CHECK(subset_with_slack(c.image, depth_cover(g.f, n).cover, 0));
    CHECK(hit_test(c, g.f, std::max(c.square.rank(), 10u), 1e-3));
  }
}
