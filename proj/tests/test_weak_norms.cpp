#include "oracles.hpp"

#include "radsum/errors.hpp"
#include "radsum/kfunctional.hpp"
#include "radsum/weak_norms.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace radsum;

namespace {

CoefficientFamily rank_one(const SpaceSpec& sp, const std::vector<double>& a, std::vector<double> u) {
  double n = norm(sp, u);
  for (double& x : u) x /= n;
  std::vector<std::vector<double>> rows;
  for (double an : a) {
    std::vector<double> r(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) r[j] = an * u[j];
    rows.push_back(r);
  }
  return CoefficientFamily(sp, rows);
}

CoefficientFamily random_family(const SpaceSpec& sp, std::size_t n, std::mt19937_64& rng) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < n; ++i) rows.push_back(oracle::random_vector(sp.dim(), rng));
  return CoefficientFamily(sp, rows);
}

double lp_seq(const std::vector<double>& a, double p) { return lp_norm(a, p); }

} // namespace

TEST_CASE("weak_lp_norm examples") {
  CoefficientFamily id(SpaceSpec::linf(2), {{1, 0}, {0, 1}});
  CHECK(weak_lp_norm(id, 2).value == 1.0);
  CHECK(weak_lp_norm(id, 2).exactness == Exactness::Exact);

  CoefficientFamily dup(SpaceSpec::l2(2), {{1, 0}, {1, 0}});
  auto r = weak_lp_norm(dup, 2);
  CHECK(r.value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  CHECK(r.exactness == Exactness::Exact);
  CHECK(oracle::l2_weak_norm_by_angles(dup, 2, 20000) == doctest::Approx(r.value).epsilon(1e-8));

  CHECK_THROWS_AS(weak_lp_norm(id, 0.5), InputError);
}

TEST_CASE("weak_lp_norm of a rank-one family is ||a||_p") {
  std::vector<double> a{0.5, -1.5, 2.0, 0.25};
  std::vector<double> u{0.3, -0.8, 0.5};
  for (auto sp : {SpaceSpec::linf(3), SpaceSpec::l1(3), SpaceSpec::l2(3), SpaceSpec::lp(3.0, 3)}) {
    auto fam = rank_one(sp, a, u);
    for (double p : {1.0, 2.0, 3.0}) {
      auto r = weak_lp_norm(fam, p);
      CHECK(r.value == doctest::Approx(lp_seq(a, p)).epsilon(1e-7));
      CHECK(r.value <= lp_seq(a, p) * (1 + 1e-10));
    }
  }
}

TEST_CASE("l2 weak norms against angle sampling") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 20; ++i) {
    auto fam = random_family(SpaceSpec::l2(2), 6, rng);
    for (double p : {1.0, 2.0}) {
      auto r = weak_lp_norm(fam, p);
      CHECK(r.exactness == Exactness::Exact);
      double o = oracle::l2_weak_norm_by_angles(fam, p, 200000);
      CHECK(r.value >= o * (1 - 1e-10));
      CHECK(r.value <= o * (1 + 1e-6));
    }
    auto lb = weak_lp_norm(fam, 3.0);
    CHECK(lb.exactness == Exactness::LowerBound);
    CHECK(lb.value == doctest::Approx(oracle::l2_weak_norm_by_angles(fam, 3.0, 200000)).epsilon(1e-6));
  }
}

TEST_CASE("require_exact refuses search-based values") {
  CoefficientFamily fam(SpaceSpec::l2(2), {{1, 0.5}, {0.2, 1}});
  WeakNormOptions opts;
  opts.require_exact = true;
  CHECK_THROWS_AS(weak_lp_norm(fam, 3.0, opts), CapacityError);
  CHECK_THROWS_AS(kw12(fam, 1.0, opts), CapacityError);
  CHECK_NOTHROW(weak_lp_norm(fam, 2.0, opts));
}

TEST_CASE("kw12 examples") {
  std::vector<double> a{1.0, -0.5, 0.25, 2.0};
  for (auto sp : {SpaceSpec::linf(2), SpaceSpec::l1(2), SpaceSpec::l2(2)}) {
    auto fam = rank_one(sp, a, {0.6, -0.4});
    for (double t : {0.0, 0.5, 1.0, 3.0}) CHECK(kw12(fam, t).value == doctest::Approx(k12_exact(a, t).value).epsilon(1e-7));
  }
  CoefficientFamily id(SpaceSpec::linf(2), {{1, 0}, {0, 1}});
  CHECK(kw12(id, 1.0).value == doctest::Approx(1.0));

  CoefficientFamily cols(SpaceSpec::linf(2), {{1, 2}, {1, 0}});
  auto kw = kw12(cols, 1.0);
  CHECK(kw.value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(kw.exactness == Exactness::Exact);
  double net = oracle::max_over_l1_net(2, 200, [&](std::span<const double> x) {
    return k12_exact(apply_dual(x, cols), 1.0).value;
  });
  CHECK(net == doctest::Approx(kw.value).epsilon(1e-12));
  CHECK_THROWS_AS(kw12(cols, -1.0), InputError);
}

TEST_CASE("linf kw12 matches the l1 dual ball net") {
  std::mt19937_64 rng(22);
  for (std::size_t m : {1u, 2u, 3u}) {
    for (int i = 0; i < 10; ++i) {
      auto fam = random_family(SpaceSpec::linf(m), 5, rng);
      for (double t : {0.3, 1.0, 2.0}) {
        double kw = kw12(fam, t).value;
        double net = oracle::max_over_l1_net(m, 40, [&](std::span<const double> x) {
          return k12_exact(apply_dual(x, fam), t).value;
        });
        CHECK(std::abs(kw - net) <= 1e-6);
      }
    }
  }
}

TEST_CASE("l1 kw12 matches a net of the dual cube") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 10; ++i) {
    auto fam = random_family(SpaceSpec::l1(2), 5, rng);
    for (double t : {0.3, 1.0, 2.0}) {
      double kw = kw12(fam, t).value;
      double best = 0.0;
      for (int u = -40; u <= 40; ++u)
        for (int v = -40; v <= 40; ++v) {
          std::vector<double> x{u / 40.0, v / 40.0};
          best = std::max(best, k12_exact(apply_dual(x, fam), t).value);
        }
      CHECK(std::abs(kw - best) <= 1e-9);
    }
  }
}

TEST_CASE("kw12 bounds, scaling and witness validity") {
  std::mt19937_64 rng(24);
  for (auto sp : {SpaceSpec::linf(3), SpaceSpec::l1(3), SpaceSpec::l2(3), SpaceSpec::lp(4.0, 3)}) {
    for (int i = 0; i < 8; ++i) {
      auto fam = random_family(sp, 7, rng);
      double w1 = weak_lp_norm(fam, 1).value;
      double w2 = weak_lp_norm(fam, 2).value;
      for (double t : {0.2, 1.0, 2.5}) {
        auto kw = kw12(fam, t);
        if (weak_lp_norm(fam, 1).exactness == Exactness::Exact && weak_lp_norm(fam, 2).exactness == Exactness::Exact)
          CHECK(kw.value <= std::min(w1, t * w2) * (1 + 1e-9));
        CHECK(kw.witness.certified_norm <= 1 + 1e-12);
        CHECK(k12_exact(apply_dual(kw.witness, fam), t).value == doctest::Approx(kw.value).epsilon(1e-9));
        for (int r = 0; r < 20; ++r) {
          auto x = oracle::random_vector(3, rng);
          double dn = dual_norm(sp, x);
          for (double& v : x) v /= dn;
          CHECK(kw.value >= k12_exact(apply_dual(x, fam), t).value * (1 - 1e-9));
        }
        double alpha = 2.75;
        auto scaled = kw12(fam.scaled(alpha), t);
        if (kw.exactness == Exactness::Exact) CHECK(scaled.value == doctest::Approx(alpha * kw.value).epsilon(1e-10));
      }
      CHECK(weak_lp_norm(fam.scaled(0.5), 2).value == doctest::Approx(0.5 * w2).epsilon(1e-9));
    }
  }
}

TEST_CASE("kw_profile") {
  CoefficientFamily fam(SpaceSpec::linf(2), {{1, 0.5}, {0.3, -2}, {0.7, 0.1}});
  std::vector<double> grid{0.0, 0.25, 0.5, 1.0, 2.0, 4.0};
  auto prof = kw_profile(fam, grid);
  CHECK(prof.points[0].value == 0.0);
  CHECK(prof.lipschitz_ok);
  CHECK(prof.all_exact());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    CHECK(prof.points[i].value >= prof.points[i - 1].value);
    CHECK(prof.points[i].value - prof.points[i - 1].value <= prof.lipschitz_bound * (grid[i] - grid[i - 1]) + 1e-9);
  }
  CHECK_THROWS_AS(kw_profile(fam, std::vector<double>{0.0, 1.0, 0.5}), InputError);
  CHECK_THROWS_AS(kw_profile(fam, std::vector<double>{-1.0, 1.0}), InputError);

  // repeated identical rows: linear in t below ||a||_2 / ||a||_inf = sqrt(N)
  CoefficientFamily rep(SpaceSpec::linf(2), {{1, 0.5}, {1, 0.5}, {1, 0.5}, {1, 0.5}});
  auto small = kw_profile(rep, std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
  for (std::size_t i = 0; i < small.grid.size(); ++i)
    CHECK(small.points[i].value == doctest::Approx(small.grid[i] * small.lipschitz_bound).epsilon(1e-12));

  CoefficientFamily l2fam(SpaceSpec::l2(2), {{1, 0.5}, {0.3, -2}, {0.7, 0.1}});
  auto lp = kw_profile(l2fam, grid);
  CHECK_FALSE(lp.all_exact());
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(lp.points[i].value >= lp.points[i - 1].value);
}

TEST_CASE("coordinatewise split") {
  std::vector<double> a{1.0, -0.5, 0.25, 2.0};
  auto fam = rank_one(SpaceSpec::linf(2), a, {1.0, 0.0});
  for (double t : {0.5, 1.0, 2.0}) {
    auto s = lemma2_split(fam, t);
    CHECK(s.bound == doctest::Approx(k12_exact(a, t).value).epsilon(1e-9));
    CHECK(s.certified);
  }
  CoefficientFamily dom(SpaceSpec::linf(2), {{3, 0.1}, {2, -0.2}, {-1, 0.05}});
  for (double t : {0.5, 1.0, 2.0}) {
    auto s = lemma2_split(dom, t);
    CHECK(s.bound / s.kw <= 2.0);
  }
  std::mt19937_64 rng(25);
  for (int i = 0; i < 1000; ++i) {
    auto f = random_family(SpaceSpec::linf(2), 6, rng);
    double t = std::uniform_real_distribution<>(0.05, 3)(rng);
    auto s = lemma2_split(f, t);
    CHECK(s.bound <= 2 * s.kw + 1e-8);
    CHECK(s.certified);
  }
  CHECK_THROWS_AS(lemma2_split(CoefficientFamily(SpaceSpec::l2(2), {{1, 0}}), 1.0), UnsupportedError);
}

TEST_CASE("weak sequence norms") {
  CHECK(weak_sequence_norm(std::vector<double>{1, 0, 0}, 1.5) == 1.0);
  // a* = (3, 2, 1): max(3, 2 * 2^{1/2}, 3^{1/2})
  CHECK(weak_sequence_norm(std::vector<double>{-1, 3, 2}, 2.0) == doctest::Approx(3.0));
  CHECK(weak_sequence_norm(std::vector<double>{1, 1, 1, 1}, 2.0) == doctest::Approx(2.0));
  CoefficientFamily fam(SpaceSpec::linf(2), {{1, 0.7}, {0.7, 1}});
  auto r = dual_weak_sequence_norm(fam, 1.5);
  CHECK(r.exactness == Exactness::LowerBound);
  CHECK(r.value == doctest::Approx(std::max(1.0, 0.7 * std::pow(2.0, 1 / 1.5))));
  auto sc = dual_weak_sequence_norm(CoefficientFamily::scalar(std::vector<double>{2, 1}), 2.0);
  CHECK(sc.exactness == Exactness::Exact);
  CHECK(sc.value == doctest::Approx(2.0));
}
