#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace radsum::oracle {

namespace {

// Projection into `c` using `w` and `tail_sq` as scratch space.
void project_into(std::span<const double> z, double t, std::vector<double>& c, std::vector<double>& w,
                  std::vector<double>& tail_sq) {
  const std::size_t n = z.size();
  c.assign(n, 0.0);
  if (t <= 0.0) return;
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = std::clamp(z[i], -1.0, 1.0);
    sq += c[i] * c[i];
  }
  if (sq <= t * t) return;
  // c_i = clamp(z_i / s, -1, 1) with s > 1 chosen so that ||c||_2 = t
  w.resize(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = std::abs(z[i]);
  std::sort(w.begin(), w.end(), std::greater<>());
  tail_sq.assign(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) tail_sq[i] = tail_sq[i + 1] + w[i] * w[i];
  double s = 1.0;
  for (std::size_t k = 0; k < n && static_cast<double>(k) < t * t; ++k) {
    double cand = std::sqrt(tail_sq[k] / (t * t - static_cast<double>(k)));
    double upper = k == 0 ? std::numeric_limits<double>::infinity() : w[k - 1];
    if (cand >= w[k] && cand <= upper) {
      s = cand;
      break;
    }
  }
  for (std::size_t i = 0; i < n; ++i) c[i] = std::clamp(z[i] / s, -1.0, 1.0);
}

} // namespace

std::vector<double> project_box_ball(std::span<const double> z, double t) {
  std::vector<double> c, w, tail;
  project_into(z, t, c, w, tail);
  return c;
}

double k12_dual_program(std::span<const double> a, double t, int restarts, std::mt19937_64& rng) {
  const std::size_t n = a.size();
  std::normal_distribution<double> gauss;
  double anorm = 0.0;
  for (double x : a) anorm += x * x;
  anorm = std::sqrt(anorm);
  if (anorm == 0.0 || t == 0.0) return 0.0;
  double best = 0.0;
  std::vector<double> z(n), c, w, tail;
  for (int r = 0; r < restarts; ++r) {
    for (double& v : z) v = gauss(rng);
    project_into(z, t, c, w, tail);
    double step = 0.25;
    for (int k = 0; k < 42; ++k) {
      for (std::size_t i = 0; i < n; ++i) z[i] = c[i] + step * a[i] / anorm;
      project_into(z, t, c, w, tail);
      step *= 2.0;
    }
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v += a[i] * c[i];
    best = std::max(best, v);
  }
  return best;
}

double k12_grid_search_2d(std::span<const double> a, double t, int cells) {
  double r = std::max(std::abs(a[0]), std::abs(a[1]));
  double best = std::numeric_limits<double>::infinity();
  for (int i = -cells; i <= cells; ++i) {
    double y0 = r * i / cells;
    for (int j = -cells; j <= cells; ++j) {
      double y1 = r * j / cells;
      double v = std::abs(a[0] - y0) + std::abs(a[1] - y1) + t * std::hypot(y0, y1);
      best = std::min(best, v);
    }
  }
  return best;
}

std::vector<double> naive_norms(const CoefficientFamily& fam) {
  const std::size_t n = fam.size();
  const std::size_t m = fam.dim();
  std::vector<double> out;
  out.reserve(std::size_t{1} << n);
  std::vector<double> sum(m);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::fill(sum.begin(), sum.end(), 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      double e = (mask >> k & 1U) ? -1.0 : 1.0;
      for (std::size_t j = 0; j < m; ++j) sum[j] += e * fam.row(k)[j];
    }
    out.push_back(norm(fam.space(), sum));
  }
  std::sort(out.begin(), out.end());
  return out;
}

double l2_weak_norm_by_angles(const CoefficientFamily& fam, double p, int angles) {
  double best = 0.0;
  for (int k = 0; k < angles; ++k) {
    double th = M_PI * k / angles;
    std::vector<double> b(fam.size());
    for (std::size_t n = 0; n < fam.size(); ++n) b[n] = std::cos(th) * fam.row(n)[0] + std::sin(th) * fam.row(n)[1];
    double s = 0.0;
    for (double x : b) s += std::pow(std::abs(x), p);
    best = std::max(best, std::pow(s, 1.0 / p));
  }
  return best;
}

double max_over_l1_net(std::size_t m, int res, const std::function<double(std::span<const double>)>& f) {
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> x(m);
  if (m == 1) {
    for (double s : {1.0, -1.0}) {
      x[0] = s;
      best = std::max(best, f(x));
    }
    return best;
  }
  // points with sum |x_j| = 1 on a lattice of step 1/res
  std::function<void(std::size_t, int)> rec = [&](std::size_t j, int left) {
    if (j == m - 1) {
      for (double s : {1.0, -1.0}) {
        x[j] = s * left / static_cast<double>(res);
        best = std::max(best, f(x));
      }
      return;
    }
    for (int k = -left; k <= left; ++k) {
      x[j] = k / static_cast<double>(res);
      rec(j + 1, left - std::abs(k));
    }
  };
  rec(0, res);
  return best;
}

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  std::vector<double> v(n);
  for (double& x : v) x = g(rng);
  return v;
}

} // namespace radsum::oracle
