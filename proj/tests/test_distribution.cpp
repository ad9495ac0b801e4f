#include "oracles.hpp"

#include "radsum/distribution.hpp"
#include "radsum/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace radsum;

namespace {

DistSummary law(std::vector<std::pair<double, int>> atoms) {
  std::vector<double> obs;
  for (auto [v, c] : atoms)
    for (int i = 0; i < c; ++i) obs.push_back(v);
  return DistSummary::from_observations(DistKind::Exact, obs, 0.0);
}

DistSummary scalar_law(std::vector<double> a) { return enumerate_exact(CoefficientFamily::scalar(a)); }

CoefficientFamily random_family(const SpaceSpec& sp, std::size_t n, std::mt19937_64& rng) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < n; ++i) rows.push_back(oracle::random_vector(sp.dim(), rng));
  return CoefficientFamily(sp, rows);
}

} // namespace

TEST_CASE("enumerate_exact examples") {
  auto d = scalar_law({1, 1});
  REQUIRE(d.size() == 2);
  CHECK(d.values()[0] == 0.0);
  CHECK(d.values()[1] == 2.0);
  CHECK(d.probability(0) == 0.5);
  CHECK(mean(d) == 1.0);

  auto id = enumerate_exact(CoefficientFamily(SpaceSpec::linf(2), {{1, 0}, {0, 1}}));
  REQUIRE(id.size() == 1);
  CHECK(id.values()[0] == 1.0);
  CHECK(moment(id, 2) == 1.0);

  auto three = scalar_law({1, 1, 1});
  REQUIRE(three.size() == 2);
  CHECK(three.values()[1] == 3.0);
  CHECK(three.probability(1) == 0.25);
  CHECK(mean(three) == 1.5);
}

TEST_CASE("enumerate_exact capacity") {
  std::vector<double> a(25, 1.0);
  CHECK_THROWS_AS(enumerate_exact(CoefficientFamily::scalar(a)), CapacityError);
  EnumerationOptions small;
  small.max_n = 4;
  CHECK_THROWS_AS(enumerate_exact(CoefficientFamily::scalar(std::vector<double>(5, 1.0)), small), CapacityError);
}

TEST_CASE("exact weights are dyadic and sum to one") {
  std::mt19937_64 rng(31);
  auto d = enumerate_exact(random_family(SpaceSpec::l1(3), 12, rng));
  CHECK(d.total() == 2048);
  std::uint64_t sum = 0;
  for (auto c : d.counts()) {
    CHECK(c > 0);
    sum += c;
  }
  CHECK(sum == d.total());
  for (std::size_t i = 1; i < d.size(); ++i) CHECK(d.values()[i] > d.values()[i - 1]);
}

TEST_CASE("gray-code sums match naive enumeration") {
  std::mt19937_64 rng(32);
  for (auto sp : {SpaceSpec::linf(3), SpaceSpec::l1(4), SpaceSpec::l2(2), SpaceSpec::lp(3.0, 2)}) {
    for (std::size_t n : {1u, 5u, 12u, 16u}) {
      auto fam = random_family(sp, n, rng);
      EnumerationOptions opts;
      opts.recompute_interval = 1000;
      opts.threads = 3;
      auto d = enumerate_exact(fam, opts);
      auto naive = oracle::naive_norms(fam);
      // expand atoms back into 2^N sorted observations
      std::vector<double> expanded;
      for (std::size_t i = 0; i < d.size(); ++i)
        for (std::uint64_t c = 0; c < d.counts()[i] * 2; ++c) expanded.push_back(d.values()[i]);
      REQUIRE(expanded.size() == naive.size());
      double scale = naive.back();
      for (std::size_t i = 0; i < naive.size(); ++i) CHECK(std::abs(expanded[i] - naive[i]) <= 1e-9 * scale);
      CHECK(d.max_relative_drift < 1e-9);
    }
  }
}

TEST_CASE("exact enumeration does not depend on thread count") {
  std::mt19937_64 rng(33);
  auto fam = random_family(SpaceSpec::linf(4), 14, rng);
  auto a = enumerate_exact(fam);
  for (unsigned th : {2u, 5u, 8u}) {
    EnumerationOptions o;
    o.threads = th;
    auto b = enumerate_exact(fam, o);
    CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin(), b.values().end()));
    CHECK(std::equal(a.counts().begin(), a.counts().end(), b.counts().begin(), b.counts().end()));
  }
}

TEST_CASE("sample_mc") {
  CoefficientFamily id(SpaceSpec::linf(2), {{1, 0}, {0, 1}});
  auto c = sample_mc(id, 1000, 7);
  CHECK(c.size() == 1);
  CHECK(c.values()[0] == 1.0);

  auto coin = sample_mc(CoefficientFamily::scalar(std::vector<double>{1, 1}), 1000000, 3);
  CHECK(std::abs(coin.tail(1.0) - 0.5) <= 0.002);
  CHECK(coin.kind() == DistKind::Empirical);
  CHECK(coin.sample_count == 1000000);

  std::mt19937_64 rng(34);
  auto fam = random_family(SpaceSpec::l2(3), 30, rng);
  auto one = sample_mc(fam, 50000, 99, 1);
  auto eight = sample_mc(fam, 50000, 99, 8);
  CHECK(std::equal(one.values().begin(), one.values().end(), eight.values().begin(), eight.values().end()));
  CHECK(std::equal(one.counts().begin(), one.counts().end(), eight.counts().begin(), eight.counts().end()));
  CHECK_THROWS_AS(sample_mc(fam, 0, 1), InputError);
}

TEST_CASE("monte carlo agrees with exact enumeration") {
  std::mt19937_64 rng(35);
  for (auto sp : {SpaceSpec::linf(1), SpaceSpec::linf(3), SpaceSpec::l1(2)}) {
    auto fam = random_family(sp, 10, rng);
    auto ex = enumerate_exact(fam);
    auto mc = sample_mc(fam, 1000000, 17, 4);
    CHECK(ks_distance(ex, mc) <= 4.0 / std::sqrt(1e6));
  }
}

TEST_CASE("rearrangement, tail, median") {
  auto coin = law({{0, 1}, {2, 1}});
  CHECK(rearrangement(coin, 0.25) == 2.0);
  CHECK(rearrangement(coin, 0.75) == 0.0);
  CHECK(rearrangement(coin, 0.5) == 0.0);
  auto c = law({{1.5, 1}});
  for (double t : {0.01, 0.5, 0.99}) CHECK(rearrangement(c, t) == 1.5);
  CHECK_THROWS_AS(rearrangement(coin, 0.0), InputError);
  CHECK_THROWS_AS(rearrangement(coin, 1.0), InputError);

  CHECK(tail(coin, 1.0) == 0.5);
  CHECK(tail(coin, -1.0) == 1.0);
  CHECK(tail(coin, 2.0) == 0.0);
  CHECK(tail(coin, 0.0) == 0.5);
  CHECK(coin.lower_tail(2.0) == 0.5);

  CHECK(median(coin) == 0.0);
  CHECK(median(c) == 1.5);
  CHECK(median(law({{1, 1}, {2, 1}, {3, 2}})) == 2.0);
}

TEST_CASE("moments") {
  auto coin = law({{0, 1}, {2, 1}});
  CHECK(moment(coin, 1) == 1.0);
  CHECK(moment(coin, 2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  auto c = law({{3.25, 1}});
  for (double p : {1.0, 2.0, 7.5, 100.0, 1000.0}) CHECK(moment(c, p) == doctest::Approx(3.25).epsilon(1e-13));
  CHECK(moment(scalar_law({1, 1, 1}), 2) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
  // large p tends to the max atom without overflow
  auto big = law({{1e3, 1}, {2e3, 1}});
  CHECK(std::isfinite(moment(big, 500)));
  CHECK(moment(big, 500) == doctest::Approx(2e3 * std::pow(0.5, 1.0 / 500)).epsilon(1e-12));
  CHECK_THROWS_AS(moment(coin, 0.5), InputError);
}

TEST_CASE("scalar orthogonality") {
  std::mt19937_64 rng(36);
  for (int i = 0; i < 30; ++i) {
    auto a = oracle::random_vector(std::uniform_int_distribution<std::size_t>(1, 14)(rng), rng);
    double ss = 0;
    for (double x : a) ss += x * x;
    auto d = scalar_law(a);
    CHECK(std::abs(moment(d, 2) * moment(d, 2) - ss) <= 1e-12 * std::max(1.0, ss));
  }
}

TEST_CASE("weak Lp of a random variable") {
  CHECK(weak_lp_rv(law({{2.5, 1}}), 3.0) == doctest::Approx(2.5));
  CHECK(weak_lp_rv(law({{0, 1}, {2, 1}}), 1.0) == doctest::Approx(1.0));
  // {1: 1/4, 2: 1/4, 3: 1/2}, p = 1: max(1 * 1, 2 * 1/2, 3 * 1/2)
  CHECK(weak_lp_rv(law({{1, 1}, {2, 1}, {3, 2}}), 1.0) == doctest::Approx(1.5));
  CHECK_THROWS_AS(weak_lp_rv(law({{1, 1}}), 0.0), InputError);
}

TEST_CASE("weak Lp chain on random instances") {
  std::mt19937_64 rng(37);
  for (int i = 0; i < 30; ++i) {
    auto d = enumerate_exact(random_family(SpaceSpec::linf(3), 10, rng));
    for (double p : {1.0, 2.0, 4.0, 8.0}) {
      double w = weak_lp_rv(d, 2 * p);
      CHECK(0.5 * moment(d, p) <= w * (1 + 1e-12));
      CHECK(w <= moment(d, 2 * p) * (1 + 1e-12));
    }
  }
}

TEST_CASE("Orlicz norm") {
  CHECK(orlicz_norm(law({{1, 1}}), 2) == doctest::Approx(1.0 / std::sqrt(std::log(2.0))).epsilon(1e-10));
  CHECK(orlicz_norm(law({{1, 1}}), 2) == doctest::Approx(1.20112).epsilon(1e-5));
  for (double q : {0.5, 1.0, 3.0}) CHECK(orlicz_norm(law({{4, 1}}), q) == doctest::Approx(4 / std::pow(std::log(2.0), 1 / q)).epsilon(1e-10));
  CHECK(orlicz_norm(law({{0, 1}, {2, 1}}), 1) == doctest::Approx(2 / std::log(3.0)).epsilon(1e-10));
  CHECK(orlicz_norm(law({{0, 1}}), 2) == 0.0);
  CHECK_THROWS_AS(orlicz_norm(law({{1, 1}}), 0.0), InputError);

  // E Psi(S / c) = 1 at the returned c
  std::mt19937_64 rng(38);
  auto d = enumerate_exact(random_family(SpaceSpec::l2(2), 9, rng));
  for (double q : {1.0, 2.5, 4.0}) {
    double c = orlicz_norm(d, q);
    double e = 0;
    for (auto at : d.atoms()) e += at.probability * (std::exp(std::pow(at.value / c, q)) - 1);
    CHECK(e == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("rearrangement form of the Orlicz norm") {
  auto c = law({{1, 1}});
  // sup over t <= 1/2 of (log 1/t)^{-1/q} is at t = 1/2
  CHECK(orlicz_rearrangement_form(c, 2.0) == doctest::Approx(1 / std::sqrt(std::log(2.0))));
}

TEST_CASE("homogeneity of weak Lp and Orlicz norms") {
  std::mt19937_64 rng(39);
  for (int i = 0; i < 10; ++i) {
    auto fam = random_family(SpaceSpec::linf(2), 9, rng);
    double alpha = std::uniform_real_distribution<>(0.1, 5)(rng);
    auto d = enumerate_exact(fam);
    auto ds = enumerate_exact(fam.scaled(alpha));
    for (double p : {0.5, 1.0, 3.0})
      CHECK(weak_lp_rv(ds, p) == doctest::Approx(alpha * weak_lp_rv(d, p)).epsilon(1e-10));
    for (double q : {1.0, 2.0, 3.0})
      CHECK(orlicz_norm(ds, q) == doctest::Approx(alpha * orlicz_norm(d, q)).epsilon(1e-9));
  }
}
