#include "radsum/weak_norms.hpp"

#include "radsum/csv_io.hpp"
#include "radsum/errors.hpp"
#include "radsum/kfunctional.hpp"
#include "radsum/random.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

namespace radsum {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Objective evaluated on the scalar sequence b = (x*(x_n)); writes a
// subgradient with respect to b into `grad`.
using SequenceObjective = std::function<double(std::span<const double> b, std::vector<double>& grad)>;

double sign(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

void normalize_dual(const SpaceSpec& space, std::vector<double>& v) {
  double n = dual_norm(space, v);
  if (n > 0.0)
    for (double& x : v) x /= n;
}

// X^T w for the coefficient matrix X (rows x_n).
std::vector<double> transpose_apply(const CoefficientFamily& fam, std::span<const double> w) {
  std::vector<double> g(fam.dim(), 0.0);
  for (std::size_t n = 0; n < fam.size(); ++n) {
    auto x = fam.row(n);
    for (std::size_t j = 0; j < x.size(); ++j) g[j] += w[n] * x[j];
  }
  return g;
}

// Gradient of the dual norm at x (a point of the dual unit sphere), for
// finite dual exponents.
std::vector<double> dual_norm_gradient(const SpaceSpec& space, std::span<const double> x) {
  const double q = space.dual_p();
  std::vector<double> g(x.size(), 0.0);
  if (std::isinf(q)) return g;
  const double n = lp_norm(x, q);
  if (n == 0.0) return g;
  for (std::size_t j = 0; j < x.size(); ++j) g[j] = sign(x[j]) * std::pow(std::abs(x[j]) / n, q - 1.0);
  return g;
}

struct SearchResult {
  double value = 0.0;
  std::vector<double> functional;
};

// Multi-start normalized subgradient ascent on the dual unit sphere. The
// objective is convex in x*, so the supremum over the ball sits on the sphere.
SearchResult sphere_ascent(const CoefficientFamily& fam, const SequenceObjective& objective,
                           const AscentOptions& opts, std::span<const std::vector<double>> seeds) {
  const SpaceSpec& space = fam.space();
  const std::size_t m = fam.dim();
  std::mt19937_64 rng(derive_seed(opts.seed, 0xA5CE17));
  std::normal_distribution<double> gauss;

  SearchResult best;
  best.functional.assign(m, 0.0);
  best.functional[0] = 1.0;
  std::vector<double> grad_b;
  best.value = objective(apply_dual(best.functional, fam), grad_b);

  const int restarts = std::max(opts.restarts, static_cast<int>(seeds.size()));
  for (int r = 0; r < restarts; ++r) {
    std::vector<double> x(m);
    if (static_cast<std::size_t>(r) < seeds.size() && seeds[r].size() == m) {
      x = seeds[r];
    } else {
      for (double& v : x) v = gauss(rng);
    }
    normalize_dual(space, x);
    if (dual_norm(space, x) == 0.0) continue;

    double step = 0.5;
    for (int k = 0; k < opts.steps; ++k) {
      double f = objective(apply_dual(x, fam), grad_b);
      if (f > best.value) {
        best.value = f;
        best.functional = x;
      }
      std::vector<double> g = transpose_apply(fam, grad_b);
      // tangential part of g at x
      std::vector<double> nrm = dual_norm_gradient(space, x);
      double nn = 0.0, gdot = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        nn += nrm[j] * nrm[j];
        gdot += nrm[j] * g[j];
      }
      if (nn > 0.0)
        for (std::size_t j = 0; j < m; ++j) g[j] -= gdot / nn * nrm[j];
      double gn = lp_norm(g, 2.0);
      if (gn == 0.0 || step < 1e-12) break;
      for (std::size_t j = 0; j < m; ++j) x[j] += step * g[j] / gn;
      normalize_dual(space, x);
      step *= opts.step_decay;
    }
    double f = objective(apply_dual(x, fam), grad_b);
    if (f > best.value) {
      best.value = f;
      best.functional = x;
    }
  }
  return best;
}

// Local search over sign vertices of the l_inf cube, for l1 spaces too large
// to enumerate.
SearchResult vertex_search(const CoefficientFamily& fam, const SequenceObjective& objective, const AscentOptions& opts) {
  const std::size_t m = fam.dim();
  std::mt19937_64 rng(derive_seed(opts.seed, 0x7E47E5));
  std::vector<double> grad_b;
  SearchResult best;
  best.value = -1.0;
  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    std::vector<double> x(m);
    for (double& v : x) v = (rng() & 1U) ? 1.0 : -1.0;
    double f = objective(apply_dual(x, fam), grad_b);
    for (int sweep = 0; sweep < opts.steps; ++sweep) {
      bool improved = false;
      for (std::size_t j = 0; j < m; ++j) {
        x[j] = -x[j];
        double g = objective(apply_dual(x, fam), grad_b);
        if (g > f) {
          f = g;
          improved = true;
        } else {
          x[j] = -x[j];
        }
      }
      if (!improved) break;
    }
    if (f > best.value) {
      best.value = f;
      best.functional = x;
    }
  }
  return best;
}

// Exact max over the 2^(m-1) sign vertices of the l_inf cube (up to the
// global sign, which leaves even objectives unchanged).
SearchResult vertex_enumeration(const CoefficientFamily& fam, const SequenceObjective& objective) {
  const std::size_t m = fam.dim();
  std::vector<double> x(m, 1.0);
  std::vector<double> b = apply_dual(x, fam);
  std::vector<double> grad_b;
  SearchResult best{objective(b, grad_b), x};
  const std::uint64_t count = std::uint64_t{1} << (m - 1);
  for (std::uint64_t i = 1; i < count; ++i) {
    // Gray code: flip coordinate ctz(i) + 1, keeping x_0 = +1
    std::size_t j = static_cast<std::size_t>(std::countr_zero(i)) + 1;
    x[j] = -x[j];
    for (std::size_t n = 0; n < fam.size(); ++n) b[n] += 2.0 * x[j] * fam.row(n)[j];
    if ((i & 0xFFFF) == 0) b = apply_dual(x, fam);
    double f = objective(b, grad_b);
    if (f > best.value) {
      best.value = f;
      best.functional = x;
    }
  }
  // final value from a fresh evaluation to remove incremental drift
  best.value = objective(apply_dual(best.functional, fam), grad_b);
  return best;
}

SequenceObjective lp_objective(double p) {
  return [p](std::span<const double> b, std::vector<double>& grad) {
    double v = lp_norm(b, p);
    grad.assign(b.size(), 0.0);
    if (v == 0.0) return 0.0;
    for (std::size_t n = 0; n < b.size(); ++n) {
      if (p == 1.0)
        grad[n] = sign(b[n]);
      else if (std::isinf(p))
        grad[n] = std::abs(b[n]) == v ? sign(b[n]) : 0.0;
      else
        grad[n] = sign(b[n]) * std::pow(std::abs(b[n]) / v, p - 1.0);
    }
    return v;
  };
}

SequenceObjective k12_objective(double t) {
  return [t](std::span<const double> b, std::vector<double>& grad) {
    KValue k = k12_exact(b, t);
    grad = k12_dual_certificate(k);
    return k.value;
  };
}

// Top singular value of X by power iteration on the Gram matrix X^T X.
SearchResult top_singular(const CoefficientFamily& fam) {
  const std::size_t m = fam.dim();
  std::vector<double> gram(m * m, 0.0);
  for (std::size_t n = 0; n < fam.size(); ++n) {
    auto x = fam.row(n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) gram[i * m + j] += x[i] * x[j];
  }
  std::mt19937_64 rng(0x51D6);
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  std::vector<double> v(m);
  for (double& x : v) x = unif(rng);
  double vn = lp_norm(v, 2.0);
  for (double& x : v) x /= vn;

  double lambda = 0.0;
  std::vector<double> w(m);
  for (int it = 0; it < 100000; ++it) {
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < m; ++j) s += gram[i * m + j] * v[j];
      w[i] = s;
    }
    double wn = lp_norm(w, 2.0);
    if (wn == 0.0) break;
    double next = 0.0;
    for (std::size_t i = 0; i < m; ++i) next += v[i] * w[i];
    for (std::size_t i = 0; i < m; ++i) v[i] = w[i] / wn;
    bool converged = std::abs(next - lambda) <= 1e-15 * std::abs(next);
    lambda = next;
    if (converged && it > 8) break;
  }
  SearchResult out;
  out.functional = v;
  out.value = lp_norm(apply_dual(v, fam), 2.0);
  return out;
}

// max over sign patterns s of ||sum s_n x_n||, which is l^w_1 in any space.
SearchResult max_signed_sum(const CoefficientFamily& fam) {
  const std::size_t n_terms = fam.size();
  const std::size_t m = fam.dim();
  std::vector<double> signs(n_terms, 1.0);
  std::vector<double> sum(m, 0.0);
  auto recompute = [&] {
    std::fill(sum.begin(), sum.end(), 0.0);
    for (std::size_t n = 0; n < n_terms; ++n)
      for (std::size_t j = 0; j < m; ++j) sum[j] += signs[n] * fam.row(n)[j];
  };
  recompute();
  std::vector<double> best_sum = sum;
  double best = norm(fam.space(), sum);
  const std::uint64_t count = std::uint64_t{1} << (n_terms - 1);
  for (std::uint64_t i = 1; i < count; ++i) {
    std::size_t k = static_cast<std::size_t>(std::countr_zero(i)) + 1;
    signs[k] = -signs[k];
    auto x = fam.row(k);
    for (std::size_t j = 0; j < m; ++j) sum[j] += 2.0 * signs[k] * x[j];
    if ((i & 0xFFFF) == 0) recompute();
    double v = norm(fam.space(), sum);
    if (v > best) {
      best = v;
      best_sum = sum;
    }
  }
  DualFunctional f = norming_functional(fam.space(), best_sum);
  return SearchResult{lp_norm(apply_dual(f, fam), 1.0), f.vector};
}

WeakNormResult to_result(const SpaceSpec& space, SearchResult r, Exactness e) {
  return WeakNormResult{r.value, e, DualFunctional::make(space, std::move(r.functional))};
}

std::vector<double> unit_vector(std::size_t m, std::size_t j) {
  std::vector<double> e(m, 0.0);
  e[j] = 1.0;
  return e;
}

} // namespace

std::string to_string(Exactness e) { return e == Exactness::Exact ? "EXACT" : "LOWER_BOUND"; }

DualFunctional norming_functional(const SpaceSpec& space, std::span<const double> v) {
  const std::size_t m = space.dim();
  std::vector<double> f(m, 0.0);
  double nv = norm(space, v);
  if (nv == 0.0) return DualFunctional{f, 0.0};
  switch (space.family()) {
  case Family::LInf: {
    std::size_t j = 0;
    for (std::size_t i = 0; i < m; ++i)
      if (std::abs(v[i]) > std::abs(v[j])) j = i;
    f[j] = sign(v[j]);
    break;
  }
  case Family::L1:
    for (std::size_t i = 0; i < m; ++i) f[i] = v[i] == 0.0 ? 1.0 : sign(v[i]);
    break;
  case Family::L2:
  case Family::Lp: {
    double p = space.p();
    for (std::size_t i = 0; i < m; ++i) f[i] = sign(v[i]) * std::pow(std::abs(v[i]) / nv, p - 1.0);
    break;
  }
  }
  return DualFunctional::make(space, std::move(f));
}

WeakNormResult weak_lp_norm(const CoefficientFamily& fam, double p, const WeakNormOptions& opts) {
  if (std::isnan(p) || p < 1.0) throw InputError("weak l_p norm needs p >= 1");
  const SpaceSpec& space = fam.space();
  const std::size_t m = fam.dim();

  if (m == 1) {
    return WeakNormResult{lp_norm(fam.column(0), p), Exactness::Exact, DualFunctional::make(space, {1.0})};
  }
  if (space.family() == Family::LInf) {
    // sup over the l1 dual ball is attained at some +-e_j: the column norms
    std::size_t best_j = 0;
    double best = -1.0;
    for (std::size_t j = 0; j < m; ++j) {
      double v = lp_norm(fam.column(j), p);
      if (v > best) {
        best = v;
        best_j = j;
      }
    }
    return WeakNormResult{best, Exactness::Exact, DualFunctional::make(space, unit_vector(m, best_j))};
  }
  if (space.family() == Family::L1 && m <= kMaxL1VertexDim)
    return to_result(space, vertex_enumeration(fam, lp_objective(p)), Exactness::Exact);
  if (space.family() == Family::L2 && p == 2.0) return to_result(space, top_singular(fam), Exactness::Exact);
  if (p == 1.0 && fam.size() <= opts.max_sign_enumeration)
    return to_result(space, max_signed_sum(fam), Exactness::Exact);

  if (opts.require_exact)
    throw CapacityError("exact weak l_" + format_double(p) + " norm unavailable for space " + space.to_string() +
                        " with N = " + std::to_string(fam.size()));
  if (space.family() == Family::L1)
    return to_result(space, vertex_search(fam, lp_objective(p), opts.ascent), Exactness::LowerBound);
  std::vector<std::vector<double>> seeds{top_singular(fam).functional};
  return to_result(space, sphere_ascent(fam, lp_objective(p), opts.ascent, seeds), Exactness::LowerBound);
}

KwValue kw12(const CoefficientFamily& fam, double t, const WeakNormOptions& opts,
             std::span<const std::vector<double>> seeds) {
  if (std::isnan(t) || t < 0.0 || std::isinf(t)) throw InputError("K^w parameter t must be finite and nonnegative");
  const SpaceSpec& space = fam.space();
  const std::size_t m = fam.dim();
  KwValue out;
  out.t = t;

  if (m == 1 || space.family() == Family::LInf) {
    std::size_t best_j = 0;
    double best = -1.0;
    for (std::size_t j = 0; j < m; ++j) {
      double v = k12_exact(fam.column(j), t).value;
      if (v > best) {
        best = v;
        best_j = j;
      }
    }
    out.value = best;
    out.witness = DualFunctional::make(space, unit_vector(m, best_j));
    return out;
  }
  SearchResult r;
  if (space.family() == Family::L1 && m <= kMaxL1VertexDim) {
    r = vertex_enumeration(fam, k12_objective(t));
  } else {
    if (opts.require_exact)
      throw CapacityError("exact K^w unavailable for space " + space.to_string() +
                          "; only linf, l1 (dim <= 20) and one-dimensional spaces are exact");
    out.exactness = Exactness::LowerBound;
    if (space.family() == Family::L1) {
      r = vertex_search(fam, k12_objective(t), opts.ascent);
    } else {
      std::vector<std::vector<double>> all_seeds(seeds.begin(), seeds.end());
      all_seeds.push_back(top_singular(fam).functional);
      r = sphere_ascent(fam, k12_objective(t), opts.ascent, all_seeds);
    }
  }
  out.witness = DualFunctional::make(space, std::move(r.functional));
  out.value = k12_exact(apply_dual(out.witness, fam), t).value;
  return out;
}

bool KProfile::all_exact() const {
  return std::all_of(points.begin(), points.end(), [](const KwValue& k) { return k.exactness == Exactness::Exact; });
}

KProfile kw_profile(const CoefficientFamily& fam, std::span<const double> grid, const WeakNormOptions& opts) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::isnan(grid[i]) || grid[i] < 0.0) throw InputError("t-grid values must be nonnegative");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw InputError("t-grid must be strictly increasing");
  }
  KProfile prof;
  prof.grid.assign(grid.begin(), grid.end());
  WeakNormResult l2 = weak_lp_norm(fam, 2.0, opts);
  prof.lipschitz_bound = l2.value;
  prof.lipschitz_exactness = l2.exactness;

  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<std::vector<double>> seeds;
    if (i > 0) seeds.push_back(prof.points.back().witness.vector);
    KwValue k = kw12(fam, grid[i], opts, seeds);
    if (i > 0 && k.exactness == Exactness::LowerBound && k.value < prof.points.back().value) {
      // K is increasing in t, so the previous witness is at least as good here
      const auto& prev = prof.points.back().witness;
      k.value = k12_exact(apply_dual(prev, fam), grid[i]).value;
      k.witness = prev;
    }
    prof.points.push_back(std::move(k));
  }
  for (std::size_t i = 1; i < prof.points.size(); ++i) {
    double diff = prof.points[i].value - prof.points[i - 1].value;
    double dt = prof.grid[i] - prof.grid[i - 1];
    if (diff < -1e-9 * std::max(1.0, prof.points[i].value) || diff > prof.lipschitz_bound * dt + 1e-9)
      prof.lipschitz_ok = false;
  }
  return prof;
}

Lemma2Split lemma2_split(const CoefficientFamily& fam, double t) {
  if (fam.space().family() != Family::LInf)
    throw UnsupportedError("the coordinatewise split is defined for linf families only");
  const std::size_t n_terms = fam.size();
  const std::size_t m = fam.dim();
  std::vector<double> x1(n_terms * m), x2(n_terms * m);
  for (std::size_t j = 0; j < m; ++j) {
    KValue k = k12_exact(fam.column(j), t);
    for (std::size_t n = 0; n < n_terms; ++n) {
      x1[n * m + j] = k.l1_part[n];
      x2[n * m + j] = k.l2_part[n];
    }
  }
  CoefficientFamily f1(fam.space(), std::move(x1), n_terms);
  CoefficientFamily f2(fam.space(), std::move(x2), n_terms);
  double w1 = weak_lp_norm(f1, 1.0).value;
  double w2 = weak_lp_norm(f2, 2.0).value;
  double kw = kw12(fam, t).value;
  double bound = w1 + t * w2;
  return Lemma2Split{t, std::move(f1), std::move(f2), w1, w2, bound, kw, bound <= 2.0 * kw + 1e-8};
}

double weak_sequence_norm(std::span<const double> a, double p) {
  if (!(p > 0.0)) throw InputError("weak sequence norm needs p > 0");
  std::vector<double> r = decreasing_rearrangement(a);
  double best = 0.0;
  for (std::size_t n = 0; n < r.size(); ++n)
    best = std::max(best, std::pow(static_cast<double>(n + 1), 1.0 / p) * r[n]);
  return best;
}

WeakNormResult dual_weak_sequence_norm(const CoefficientFamily& fam, double p) {
  const std::size_t m = fam.dim();
  if (m != 1 && fam.space().family() != Family::LInf)
    throw UnsupportedError("dual weak sequence norm is implemented for linf and one-dimensional families");
  std::size_t best_j = 0;
  double best = -1.0;
  for (std::size_t j = 0; j < m; ++j) {
    double v = weak_sequence_norm(fam.column(j), p);
    if (v > best) {
      best = v;
      best_j = j;
    }
  }
  // the weak quasi-norm is not convex, so the column maximum only bounds the
  // dual-ball supremum from below once m > 1
  Exactness e = m == 1 ? Exactness::Exact : Exactness::LowerBound;
  return WeakNormResult{best, e, DualFunctional::make(fam.space(), unit_vector(m, best_j))};
}

} // namespace radsum
