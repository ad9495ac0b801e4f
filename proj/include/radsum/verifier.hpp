#pragma once

#include "radsum/distribution.hpp"
#include "radsum/spaces.hpp"
#include "radsum/weak_norms.hpp"

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace radsum {

// A coefficient family together with the law of S = ||sum eps_n x_n|| and a
// memo of K^w evaluations. Not safe for concurrent use (the memo mutates).
class Model {
public:
  Model(CoefficientFamily fam, DistSummary dist, WeakNormOptions opts = {});

  const CoefficientFamily& family() const noexcept { return fam_; }
  const DistSummary& dist() const noexcept { return dist_; }
  double mean() const noexcept { return mean_; }
  const std::string& hash() const noexcept { return hash_; }
  const WeakNormOptions& options() const noexcept { return opts_; }

  const KwValue& kw(double t);
  // kw(t) but throws UnsupportedError unless the value is exact.
  double kw_exact(double t, const std::string& check_id);
  void require_exact_dist(const std::string& check_id) const;

private:
  CoefficientFamily fam_;
  DistSummary dist_;
  WeakNormOptions opts_;
  double mean_;
  std::string hash_;
  std::map<double, KwValue> kw_cache_;
};

// 64-bit FNV-1a digest of the space and the coefficient bytes, as hex.
std::string instance_hash(const CoefficientFamily& fam);
std::string digest_hex(std::string_view bytes);

inline constexpr double kMarginSlack = 1e-9;

struct MarginEntry {
  std::string label;
  double param = 0.0;
  double margin = 0.0;
};

struct SeriesPoint {
  double param = 0.0;
  double value = 0.0;
};

struct CheckRecord {
  std::string id;
  std::string instance_hash;
  std::string instance;
  std::vector<MarginEntry> margins;
  // ratio envelopes and similar per-parameter series, keyed by name
  std::map<std::string, std::vector<SeriesPoint>> series;
  std::map<std::string, double> fitted;
  std::map<std::string, double> witness;
  std::vector<std::string> notes;
  double worst_margin = 0.0;
  bool pass = false;
  bool skipped = false;

  void add(std::string label, double param, double margin) { margins.push_back({std::move(label), param, margin}); }
  // worst_margin = min over margins; pass iff worst_margin >= -kMarginSlack.
  void finalize();
};

// Largest c in (0, 1] (to 2^-60) such that holds(c) is true, assuming the
// predicate is monotone: true at c implies true below c. Returns 0 when no
// tested c passes.
double fit_largest(const std::function<bool(double)>& holds);

struct Envelope {
  double lo;
  double hi;
};

inline constexpr Envelope kCor1Band{1.0 / 30.0, 30.0};
inline constexpr Envelope kCor3Band{1.0 / 10.0, 10.0};
// Ratio band for the Psi_q norm against E S + sup ||(x*(x_n))||_{p,inf}.
Envelope cor4_band(double q);

// Tail of S beyond 2 E S + 6 K^w(t) against 4 exp(-t^2/8).
CheckRecord check_main_upper(Model& model, const std::vector<double>& t_grid);
// Largest c with P(S > E S / 2 + c K^w(t)) >= c exp(-t^2/c) on the grid.
CheckRecord check_main_lower_fit(Model& model, const std::vector<double>& t_grid);
// S*(t) / (E S + K^w(sqrt(log 1/t))) for t in (0, 1/10].
CheckRecord check_cor1(Model& model, const std::vector<double>& t_grid);
// Largest c1 with P(S > s t) <= (P(S > t) / c1)^{c1 s^2}, plus the doubling
// bound P(S > 2t) <= 4 P(S > t)^2 at every atom. Empty `thresholds` selects up
// to 256 atoms of S.
CheckRecord check_cor2(Model& model, const std::vector<double>& thresholds, const std::vector<double>& s_grid);
// ||S||_p / (E S + K^w(sqrt p)), the weak-L chain and the moment comparison
// ||S||_{2p} <= sqrt(3) ||S||_p.
CheckRecord check_cor3(Model& model, const std::vector<double>& p_grid);
// ||S||_{psi_q} / (E S + max_j ||column j||_{p,inf}), 1/p + 1/q = 1.
CheckRecord check_cor4(Model& model, const std::vector<double>& q_grid);
// P(|S - M| > t sigma) against 4 exp(-t^2/8) with M the lower median and
// sigma = l^w_2, on the grid and at every jump of the deviation law.
CheckRecord check_theorem_a(Model& model, const std::vector<double>& t_grid);
// E S^2 <= 9 (E S)^2, Paley-Zygmund on the lambda grid, and
// P(S > (1 - 3/sqrt 10) E S) >= 1/10.
CheckRecord check_moment_facts(Model& model, const std::vector<double>& lambda_grid);
// Largest d with P(sum eps_n a_n > d K(a, t)) >= d exp(-t^2/d). Scalar only.
CheckRecord check_scalar_lower(Model& model, const std::vector<double>& t_grid);
// Coordinatewise split certificate l^w_1 + t l^w_2 <= 2 K^w + 1e-8. LInf only.
CheckRecord check_lemma2(Model& model, const std::vector<double>& t_grid);

struct VerifyGrids {
  std::vector<double> t;
  std::vector<double> cor1_t;
  std::vector<double> p;
  std::vector<double> q;
  std::vector<double> s;
  std::vector<double> lambda;
  std::vector<double> thresholds;
};

VerifyGrids default_grids();

// Known check ids in report order.
const std::vector<std::string>& check_ids();

// Runs the requested checks in check_ids() order. Checks that do not apply to
// the instance (e.g. scalar-only checks on a vector family) are recorded as
// skipped.
std::vector<CheckRecord> run_checks(Model& model, const VerifyGrids& grids, const std::vector<std::string>& ids);

} // namespace radsum
