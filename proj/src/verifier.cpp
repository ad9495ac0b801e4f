#include "radsum/verifier.hpp"

#include "radsum/csv_io.hpp"
#include "radsum/errors.hpp"
#include "radsum/kfunctional.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>

namespace radsum {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv_bytes(std::uint64_t& h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool is_zero_law(const DistSummary& d) { return d.max() <= 0.0; }

CheckRecord start(const Model& model, std::string id) {
  CheckRecord r;
  r.id = std::move(id);
  r.instance_hash = model.hash();
  r.instance = model.family().space().to_string() + " N=" + std::to_string(model.family().size());
  return r;
}

CheckRecord skipped(const Model& model, std::string id, std::string why) {
  CheckRecord r = start(model, std::move(id));
  r.skipped = true;
  r.pass = true;
  r.notes.push_back(std::move(why));
  return r;
}

double band_margin(double ratio, Envelope band) { return std::min(ratio - band.lo, band.hi - ratio); }

void record_envelope(CheckRecord& rec, const std::vector<SeriesPoint>& ratios) {
  if (ratios.empty()) return;
  auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end(),
                                      [](const SeriesPoint& a, const SeriesPoint& b) { return a.value < b.value; });
  rec.fitted["ratio_min"] = lo->value;
  rec.fitted["ratio_max"] = hi->value;
  rec.witness["ratio_min_at"] = lo->param;
  rec.witness["ratio_max_at"] = hi->param;
}

// Atom values of S sampled at evenly spaced ranks, positive values only.
std::vector<double> atom_thresholds(const DistSummary& d, std::size_t max_count) {
  std::vector<double> pos;
  for (double v : d.values())
    if (v > 0.0) pos.push_back(v);
  if (pos.size() <= max_count) return pos;
  std::vector<double> out;
  for (std::size_t k = 0; k < max_count; ++k) out.push_back(pos[k * (pos.size() - 1) / (max_count - 1)]);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

} // namespace

std::string digest_hex(std::string_view bytes) {
  std::uint64_t h = kFnvOffset;
  fnv_bytes(h, bytes.data(), bytes.size());
  return hex64(h);
}

std::string instance_hash(const CoefficientFamily& fam) {
  std::uint64_t h = kFnvOffset;
  std::string space = fam.space().to_string();
  fnv_bytes(h, space.data(), space.size());
  std::uint64_t n = fam.size();
  fnv_bytes(h, &n, sizeof n);
  for (double x : fam.entries()) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    fnv_bytes(h, &bits, sizeof bits);
  }
  return hex64(h);
}

Model::Model(CoefficientFamily fam, DistSummary dist, WeakNormOptions opts)
    : fam_(std::move(fam)), dist_(std::move(dist)), opts_(opts), mean_(radsum::mean(dist_)),
      hash_(instance_hash(fam_)) {}

const KwValue& Model::kw(double t) {
  auto it = kw_cache_.find(t);
  if (it == kw_cache_.end()) it = kw_cache_.emplace(t, kw12(fam_, t, opts_)).first;
  return it->second;
}

double Model::kw_exact(double t, const std::string& check_id) {
  const KwValue& k = kw(t);
  if (k.exactness != Exactness::Exact)
    throw UnsupportedError(check_id + " needs an exact K^w; space " + fam_.space().to_string() +
                           " only yields a lower bound");
  return k.value;
}

void Model::require_exact_dist(const std::string& check_id) const {
  if (dist_.kind() != DistKind::Exact)
    throw UnsupportedError(check_id + " needs the exact distribution of S (enumeration mode)");
}

void CheckRecord::finalize() {
  worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& m : margins) worst_margin = std::min(worst_margin, m.margin);
  if (margins.empty()) worst_margin = 0.0;
  pass = worst_margin >= -kMarginSlack;
}

double fit_largest(const std::function<bool(double)>& holds) {
  if (holds(1.0)) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    if (holds(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

Envelope cor4_band(double q) {
  // constant S already gives (ln 2)^{-1/q}; widen around that
  double base = std::pow(std::log(2.0), -1.0 / q);
  return Envelope{1.0 / (10.0 * base), 10.0 * base};
}

CheckRecord check_main_upper(Model& model, const std::vector<double>& t_grid) {
  const std::string id = "main_upper";
  model.require_exact_dist(id);
  CheckRecord rec = start(model, id);
  auto& tails = rec.series["tail"];
  auto& env = rec.series["envelope"];
  for (double t : t_grid) {
    double k = model.kw_exact(t, id);
    double bound = 4.0 * std::exp(-t * t / 8.0);
    double p = model.dist().tail(2.0 * model.mean() + 6.0 * k);
    rec.add("4exp(-t^2/8) - P(S > 2ES + 6K^w(t))", t, bound - p);
    tails.push_back({t, p});
    env.push_back({t, bound});
  }
  rec.finalize();
  return rec;
}

CheckRecord check_main_lower_fit(Model& model, const std::vector<double>& t_grid) {
  const std::string id = "main_lower_fit";
  model.require_exact_dist(id);
  if (is_zero_law(model.dist())) return skipped(model, id, "S is identically zero");
  CheckRecord rec = start(model, id);
  std::vector<double> k(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) k[i] = model.kw_exact(t_grid[i], id);
  const double half_mean = 0.5 * model.mean();
  auto slack = [&](double c, std::size_t i) {
    double t = t_grid[i];
    return model.dist().tail(half_mean + c * k[i]) - c * std::exp(-t * t / c);
  };
  double c = fit_largest([&](double c) {
    for (std::size_t i = 0; i < t_grid.size(); ++i)
      if (slack(c, i) < 0.0) return false;
    return true;
  });
  rec.fitted["c"] = c;
  if (c > 0.0) {
    for (std::size_t i = 0; i < t_grid.size(); ++i) rec.add("P(S > ES/2 + cK^w(t)) - c exp(-t^2/c)", t_grid[i], slack(c, i));
    if (c < 1.0) {
      // the constraint that stops c from growing further
      double above = std::min(1.0, c * (1.0 + 1e-12) + 1e-18);
      std::size_t worst = 0;
      for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (slack(above, i) < slack(above, worst)) worst = i;
      rec.witness["t_binding"] = t_grid[worst];
    }
  } else {
    rec.add("positive fit exists", 0.0, -1.0);
  }
  rec.notes.push_back("empirical fit for this instance; not the universal constant");
  rec.finalize();
  return rec;
}

CheckRecord check_cor1(Model& model, const std::vector<double>& t_grid) {
  const std::string id = "cor1";
  model.require_exact_dist(id);
  CheckRecord rec = start(model, id);
  auto& ratios = rec.series["ratio"];
  auto& lhs = rec.series["rearrangement"];
  auto& rhs = rec.series["mean_plus_kw"];
  for (double t : t_grid) {
    if (!(t > 0.0 && t <= 0.1)) throw InputError("cor1 grid values must lie in (0, 1/10]");
    double s_star = rearrangement(model.dist(), t);
    double den = model.mean() + model.kw_exact(std::sqrt(std::log(1.0 / t)), id);
    double r = den > 0.0 ? s_star / den : 1.0;
    ratios.push_back({t, r});
    lhs.push_back({t, s_star});
    rhs.push_back({t, den});
    rec.add("ratio within [1/30, 30]", t, band_margin(r, kCor1Band));
  }
  record_envelope(rec, ratios);
  rec.finalize();
  return rec;
}

CheckRecord check_cor2(Model& model, const std::vector<double>& thresholds, const std::vector<double>& s_grid) {
  const std::string id = "cor2";
  model.require_exact_dist(id);
  CheckRecord rec = start(model, id);
  const DistSummary& d = model.dist();

  // Doubling: for t in [v_i, v_{i+1}) the tail P(S > t) is constant while
  // P(S > 2t) is largest at t = v_i, so atoms plus t = 0 cover every t >= 0.
  double worst_doubling = std::numeric_limits<double>::infinity();
  double worst_doubling_at = 0.0;
  auto doubling = [&](double t) {
    double a = d.tail(t);
    double m = 4.0 * a * a - d.tail(2.0 * t);
    if (m < worst_doubling) {
      worst_doubling = m;
      worst_doubling_at = t;
    }
  };
  doubling(0.0);
  for (double v : d.values()) doubling(v);
  rec.add("4P(S > t)^2 - P(S > 2t), worst over all t", worst_doubling_at, worst_doubling);

  std::vector<double> ts = thresholds.empty() ? atom_thresholds(d, 256) : thresholds;
  ts.erase(std::remove_if(ts.begin(), ts.end(), [](double t) { return !(t > 0.0); }), ts.end());
  if (ts.empty()) {
    rec.notes.push_back("no positive thresholds; S is identically zero");
    rec.finalize();
    return rec;
  }
  for (double s : s_grid)
    if (!(s >= 1.0)) throw InputError("cor2 s-grid values must be >= 1");

  struct Constraint {
    double t, s, lhs, log_alpha;
  };
  std::vector<Constraint> cons;
  for (double t : ts) {
    double alpha = d.tail(t);
    for (double s : s_grid) cons.push_back({t, s, d.tail(s * t), alpha > 0.0 ? std::log(alpha) : -INFINITY});
  }
  auto rhs = [](const Constraint& k, double c1) {
    if (std::isinf(k.log_alpha)) return 0.0;
    return std::exp(c1 * k.s * k.s * (k.log_alpha - std::log(c1)));
  };
  auto fit = [&](double s_min) {
    return fit_largest([&](double c1) {
      for (const auto& k : cons)
        if (k.s >= s_min && k.lhs > rhs(k, c1)) return false;
      return true;
    });
  };
  double c1 = fit(1.0);
  double c1_large = fit(4.0);
  rec.fitted["c1"] = c1;
  rec.fitted["c1_s_ge_4"] = c1_large;
  bool has_large = std::any_of(s_grid.begin(), s_grid.end(), [](double s) { return s >= 4.0; });
  rec.notes.push_back("c1 fitted over all s >= 1; c1_s_ge_4 over the regime s >= 4 only");
  if (c1 > 0.0) {
    double worst = std::numeric_limits<double>::infinity();
    const Constraint* at = nullptr;
    for (const auto& k : cons) {
      double m = rhs(k, c1) - k.lhs;
      if (m < worst) {
        worst = m;
        at = &k;
      }
    }
    if (at) {
      rec.witness["t_binding"] = at->t;
      rec.witness["s_binding"] = at->s;
    }
  } else {
    rec.add("positive c1 exists", 0.0, -1.0);
  }
  if (has_large && !(c1_large > 0.0)) rec.add("positive c1 exists for s >= 4", 4.0, -1.0);
  rec.notes.push_back("empirical fit for this instance; not the universal constant");
  rec.finalize();
  return rec;
}

CheckRecord check_cor3(Model& model, const std::vector<double>& p_grid) {
  const std::string id = "cor3";
  model.require_exact_dist(id);
  CheckRecord rec = start(model, id);
  const DistSummary& d = model.dist();
  auto& ratios = rec.series["ratio"];
  const double sqrt3 = std::sqrt(3.0);
  for (double p : p_grid) {
    if (!(p >= 1.0)) throw InputError("cor3 p-grid values must be >= 1");
    double sp = moment(d, p);
    double den = model.mean() + model.kw_exact(std::sqrt(p), id);
    double r = den > 0.0 ? sp / den : 1.0;
    ratios.push_back({p, r});
    rec.add("ratio within [1/10, 10]", p, band_margin(r, kCor3Band));
    double s2p = moment(d, 2.0 * p);
    double w2p = weak_lp_rv(d, 2.0 * p);
    rec.add("||S||_{2p,inf} - ||S||_p / 2", p, w2p - 0.5 * sp);
    rec.add("||S||_{2p} - ||S||_{2p,inf}", p, s2p - w2p);
    rec.add("sqrt(3) ||S||_p - ||S||_{2p}", p, sqrt3 * sp - s2p);
  }
  record_envelope(rec, ratios);
  rec.finalize();
  return rec;
}

CheckRecord check_cor4(Model& model, const std::vector<double>& q_grid) {
  const std::string id = "cor4";
  model.require_exact_dist(id);
  const CoefficientFamily& fam = model.family();
  if (fam.dim() != 1 && fam.space().family() != Family::LInf)
    return skipped(model, id, "weak sequence supremum implemented for linf and scalar families only");
  CheckRecord rec = start(model, id);
  const DistSummary& d = model.dist();
  auto& ratios = rec.series["ratio"];
  auto& surrogate = rec.series["rearrangement_form_ratio"];
  for (double q : q_grid) {
    if (!(q > 1.0)) throw InputError("cor4 q-grid values must exceed 1");
    if (q <= 2.0) rec.notes.push_back("q = " + format_double(q) + " lies outside the range q > 2");
    double p = q / (q - 1.0);
    double orl = orlicz_norm(d, q);
    WeakNormResult w = dual_weak_sequence_norm(fam, p);
    double den = model.mean() + w.value;
    double r = den > 0.0 ? orl / den : 1.0;
    ratios.push_back({q, r});
    double form = orlicz_rearrangement_form(d, q);
    surrogate.push_back({q, orl > 0.0 ? form / orl : 1.0});
    Envelope band = cor4_band(q);
    rec.add("ratio within the q band", q, band_margin(r, band));
    rec.fitted["band_lo_q" + format_double(q)] = band.lo;
    rec.fitted["band_hi_q" + format_double(q)] = band.hi;
  }
  if (fam.dim() > 1)
    rec.notes.push_back("weak sequence term is the column maximum, a lower bound of the dual-ball supremum");
  record_envelope(rec, ratios);
  rec.finalize();
  return rec;
}

CheckRecord check_theorem_a(Model& model, const std::vector<double>& t_grid) {
  const std::string id = "theorem_a";
  model.require_exact_dist(id);
  WeakNormOptions opts = model.options();
  opts.require_exact = true;
  WeakNormResult sig = weak_lp_norm(model.family(), 2.0, opts);
  CheckRecord rec = start(model, id);
  const double sigma = sig.value;
  const double med = median(model.dist());
  rec.fitted["sigma"] = sigma;
  rec.fitted["median"] = med;

  // deviation law |S - M|, sorted, with exact counts
  const DistSummary& d = model.dist();
  std::vector<std::pair<double, std::uint64_t>> dev;
  dev.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) dev.emplace_back(std::abs(d.values()[i] - med), d.counts()[i]);
  std::sort(dev.begin(), dev.end());
  // suffix[i] = total count of dev[i..]
  std::vector<std::uint64_t> suffix(dev.size() + 1, 0);
  for (std::size_t i = dev.size(); i-- > 0;) suffix[i] = suffix[i + 1] + dev[i].second;
  const double total = static_cast<double>(d.total());
  auto prob_beyond = [&](double u) {
    auto it = std::upper_bound(dev.begin(), dev.end(), u, [](double x, const auto& e) { return x < e.first; });
    return static_cast<double>(suffix[static_cast<std::size_t>(it - dev.begin())]) / total;
  };
  auto bound = [&](double u) {
    if (sigma == 0.0) return u > 0.0 ? 0.0 : 4.0;
    return 4.0 * std::exp(-u * u / (8.0 * sigma * sigma));
  };
  for (double t : t_grid) {
    double u = t * sigma;
    rec.add("4exp(-u^2/8sigma^2) - P(|S - M| > u), u = t sigma", t, bound(u) - prob_beyond(u));
  }
  // Exhaustive sweep: on [D_k, D_{k+1}) the deviation tail is constant and the
  // bound is smallest as u approaches D_{k+1}.
  double worst = bound(dev.front().first) - 1.0;
  double worst_at = dev.front().first;
  for (std::size_t k = 0; k + 1 < dev.size(); ++k) {
    if (dev[k + 1].first == dev[k].first) continue;
    double m = bound(dev[k + 1].first) - static_cast<double>(suffix[k + 1]) / total;
    if (m < worst) {
      worst = m;
      worst_at = dev[k + 1].first;
    }
  }
  rec.add("sweep over all deviation jumps", worst_at, worst);
  rec.finalize();
  return rec;
}

CheckRecord check_moment_facts(Model& model, const std::vector<double>& lambda_grid) {
  const std::string id = "moment_facts";
  model.require_exact_dist(id);
  const DistSummary& d = model.dist();
  if (is_zero_law(d)) return skipped(model, id, "S is identically zero");
  CheckRecord rec = start(model, id);
  const double es = model.mean();
  const double es2 = std::pow(moment(d, 2.0), 2.0);
  rec.fitted["E S"] = es;
  rec.fitted["E S^2"] = es2;
  rec.add("9(E S)^2 - E S^2", 0.0, 9.0 * es * es - es2);
  for (double lambda : lambda_grid) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw InputError("lambda grid values must lie in (0, 1)");
    double p = d.tail(lambda * es);
    double pz = (1.0 - lambda) * (1.0 - lambda);
    rec.add("P(S > lambda ES) - (1-lambda)^2 (ES)^2 / ES^2", lambda, p - pz * es * es / es2);
    rec.add("P(S > lambda ES) - (1-lambda)^2 / 9", lambda, p - pz / 9.0);
  }
  double lambda10 = 1.0 - 3.0 / std::sqrt(10.0);
  rec.add("P(S > (1 - 3/sqrt10) ES) - 1/10", lambda10, d.tail(lambda10 * es) - 0.1);
  rec.finalize();
  return rec;
}

CheckRecord check_scalar_lower(Model& model, const std::vector<double>& t_grid) {
  const std::string id = "scalar_lower";
  model.require_exact_dist(id);
  if (!model.family().is_scalar()) return skipped(model, id, "applies to scalar families only");
  if (is_zero_law(model.dist())) return skipped(model, id, "S is identically zero");
  CheckRecord rec = start(model, id);
  std::vector<double> k(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) k[i] = model.kw_exact(t_grid[i], id);
  // sum eps_n a_n is symmetric: P(X > s) = P(|X| > s) / 2 for s >= 0
  auto slack = [&](double dconst, std::size_t i) {
    double t = t_grid[i];
    return 0.5 * model.dist().tail(dconst * k[i]) - dconst * std::exp(-t * t / dconst);
  };
  double dfit = fit_largest([&](double c) {
    for (std::size_t i = 0; i < t_grid.size(); ++i)
      if (slack(c, i) < 0.0) return false;
    return true;
  });
  rec.fitted["d"] = dfit;
  if (dfit > 0.0) {
    for (std::size_t i = 0; i < t_grid.size(); ++i)
      rec.add("P(X > dK(a,t)) - d exp(-t^2/d)", t_grid[i], slack(dfit, i));
  } else {
    rec.add("positive fit exists", 0.0, -1.0);
  }
  rec.notes.push_back("empirical fit for this instance; not the universal constant");
  rec.finalize();
  return rec;
}

CheckRecord check_lemma2(Model& model, const std::vector<double>& t_grid) {
  const std::string id = "lemma2";
  if (model.family().space().family() != Family::LInf) return skipped(model, id, "applies to linf families only");
  CheckRecord rec = start(model, id);
  auto& ratio = rec.series["bound_over_kw"];
  for (double t : t_grid) {
    Lemma2Split split = lemma2_split(model.family(), t);
    rec.add("2K^w + 1e-8 - (l^w_1 + t l^w_2)", t, 2.0 * split.kw + 1e-8 - split.bound);
    ratio.push_back({t, split.kw > 0.0 ? split.bound / split.kw : 1.0});
  }
  rec.finalize();
  return rec;
}

VerifyGrids default_grids() {
  VerifyGrids g;
  for (int i = 0; i <= 60; ++i) g.t.push_back(i / 10.0);
  g.cor1_t = {1e-6, 1e-5, 1e-4, 1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 1e-1};
  g.p = {1, 2, 4, 8, 16};
  g.q = {2.5, 3, 4, 6};
  g.s = {1, 1.5, 2, 3, 4, 6, 8};
  g.lambda = {0.1, 0.25, 0.5, 0.75, 0.9};
  return g;
}

const std::vector<std::string>& check_ids() {
  static const std::vector<std::string> ids{"main_upper", "main_lower_fit", "cor1",         "cor2",        "cor3",
                                            "cor4",       "theorem_a",      "moment_facts", "scalar_lower", "lemma2"};
  return ids;
}

std::vector<CheckRecord> run_checks(Model& model, const VerifyGrids& g, const std::vector<std::string>& ids) {
  for (const auto& id : ids)
    if (std::find(check_ids().begin(), check_ids().end(), id) == check_ids().end())
      throw InputError("unknown check id '" + id + "'");
  std::vector<CheckRecord> out;
  for (const auto& id : check_ids()) {
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) continue;
    try {
      if (id == "main_upper") out.push_back(check_main_upper(model, g.t));
      else if (id == "main_lower_fit") out.push_back(check_main_lower_fit(model, g.t));
      else if (id == "cor1") out.push_back(check_cor1(model, g.cor1_t));
      else if (id == "cor2") out.push_back(check_cor2(model, g.thresholds, g.s));
      else if (id == "cor3") out.push_back(check_cor3(model, g.p));
      else if (id == "cor4") out.push_back(check_cor4(model, g.q));
      else if (id == "theorem_a") out.push_back(check_theorem_a(model, g.t));
      else if (id == "moment_facts") out.push_back(check_moment_facts(model, g.lambda));
      else if (id == "scalar_lower") out.push_back(check_scalar_lower(model, g.t));
      else if (id == "lemma2") out.push_back(check_lemma2(model, g.t));
    } catch (const UnsupportedError& e) {
      out.push_back(skipped(model, id, e.what()));
    } catch (const CapacityError& e) {
      out.push_back(skipped(model, id, e.what()));
    }
  }
  return out;
}

} // namespace radsum
