// radsum: K-functionals, weak norms and exact laws of vector Rademacher sums.

#include "radsum/csv_io.hpp"
#include "radsum/distribution.hpp"
#include "radsum/errors.hpp"
#include "radsum/kfunctional.hpp"
#include "radsum/scenario.hpp"
#include "radsum/verifier.hpp"
#include "radsum/weak_norms.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace radsum;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> exact_max_n;

  ScenarioOverrides overrides() const {
    ScenarioOverrides o;
    o.seed = seed;
    o.threads = threads;
    if (out_dir) o.out_dir = std::filesystem::path(*out_dir);
    o.exact_max_n = exact_max_n;
    return o;
  }
};

CoefficientFamily load_family(const std::string& csv, const std::string& space_text) {
  auto rows = read_coefficients_csv(csv);
  SpaceSpec space = SpaceSpec::parse(space_text, rows.front().size());
  return CoefficientFamily(space, rows);
}

int run_kfun(const std::string& csv, const std::string& grid, std::size_t column) {
  auto rows = read_coefficients_csv(csv);
  CoefficientFamily fam(SpaceSpec::linf(rows.front().size()), rows);
  if (column < 1 || column > fam.dim()) throw InputError("--column must lie in 1.." + std::to_string(fam.dim()));
  std::vector<double> a = fam.column(column - 1);
  std::cout << "t,k_exact,k_holmstedt,rho,l1_part,l2_part\n";
  for (double t : parse_grid(grid)) {
    KValue k = k12_exact(a, t);
    std::cout << format_double(t) << ',' << format_double(k.value) << ',' << format_double(k12_holmstedt(a, t))
              << ',' << format_double(k.rho) << ',' << format_double(lp_norm(k.l1_part, 1.0)) << ','
              << format_double(lp_norm(k.l2_part, 2.0)) << '\n';
  }
  return 0;
}

int run_weaknorm(const std::string& csv, const std::string& space, double p, const Globals& g) {
  CoefficientFamily fam = load_family(csv, space);
  WeakNormOptions opts;
  opts.ascent.seed = g.seed.value_or(0);
  WeakNormResult r = weak_lp_norm(fam, p, opts);
  std::cout << "p,value,exactness";
  for (std::size_t j = 0; j < fam.dim(); ++j) std::cout << ",witness_" << j + 1;
  std::cout << '\n' << format_double(p) << ',' << format_double(r.value) << ',' << to_string(r.exactness);
  for (double w : r.witness.vector) std::cout << ',' << format_double(w);
  std::cout << '\n';
  return 0;
}

int run_kwprofile(const std::string& csv, const std::string& space, const std::string& grid, const Globals& g) {
  CoefficientFamily fam = load_family(csv, space);
  WeakNormOptions opts;
  opts.ascent.seed = g.seed.value_or(0);
  std::vector<double> ts = parse_grid(grid);
  KProfile prof = kw_profile(fam, ts, opts);
  std::cout << kprofile_csv(prof, "");
  if (!prof.lipschitz_ok) std::cerr << "warning: profile violates the monotone/Lipschitz envelope\n";
  return 0;
}

int run_dist(const std::string& csv, const std::string& space, bool mc, std::uint64_t samples,
             const std::string& p_grid, const std::string& q_grid, const Globals& g) {
  CoefficientFamily fam = load_family(csv, space);
  DistSummary d = [&] {
    if (mc) return sample_mc(fam, samples, g.seed.value_or(0), g.threads.value_or(1));
    EnumerationOptions eo;
    eo.max_n = g.exact_max_n.value_or(kDefaultExactMaxN);
    eo.threads = g.threads.value_or(1);
    if (eo.max_n > kDefaultExactMaxN && fam.size() > kDefaultExactMaxN)
      std::cerr << "warning: exact enumeration of 2^" << fam.size() - 1 << " sign patterns\n";
    return enumerate_exact(fam, eo);
  }();
  std::filesystem::path dir = g.out_dir.value_or(".");
  std::filesystem::create_directories(dir);
  const std::string comment = std::string("# radsum ") + kVersion + " instance=" + instance_hash(fam);
  {
    std::ofstream out(dir / "dist.csv", std::ios::binary);
    if (!out) throw InputError("cannot write " + (dir / "dist.csv").string());
    out << dist_csv(d, comment);
  }
  auto summary = dist_summary_json(d, parse_grid(p_grid), parse_grid(q_grid));
  summary["instance_hash"] = instance_hash(fam);
  {
    std::ofstream out(dir / "dist_summary.json", std::ios::binary);
    out << summary.dump(2) << '\n';
  }
  std::cout << summary.dump(2) << '\n';
  return 0;
}

void print_checks(const std::vector<CheckRecord>& checks) {
  for (const auto& c : checks) {
    const char* status = c.skipped ? "SKIP" : (c.pass ? "PASS" : "FAIL");
    std::cerr << status << "  " << c.id << "  worst_margin=" << format_double(c.worst_margin);
    for (const auto& [k, v] : c.fitted)
      if (k.rfind("band_", 0) != 0) std::cerr << "  " << k << "=" << format_double(v);
    std::cerr << '\n';
  }
}

int run_verify(const std::string& scenario_path, const std::string& out, const Globals& g) {
  Scenario s = load_scenario(scenario_path, g.overrides());
  ResultBundle b = run_scenario(s);
  std::filesystem::path out_path = out.empty() ? s.out_dir / "report.json" : std::filesystem::path(out);
  if (out_path.has_parent_path()) std::filesystem::create_directories(out_path.parent_path());
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw InputError("cannot write " + out_path.string());
  f << b.report.dump(2) << '\n';
  print_checks(b.checks);
  return b.all_pass ? 0 : static_cast<int>(ExitCode::VerificationFailure);
}

int run_report(const std::string& scenario_path, const Globals& g) {
  Scenario s = load_scenario(scenario_path, g.overrides());
  ResultBundle b = run_scenario(s);
  write_bundle(s, b);
  print_checks(b.checks);
  for (const auto& f : b.files) std::cout << f.string() << '\n';
  return b.all_pass ? 0 : static_cast<int>(ExitCode::VerificationFailure);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"radsum: K-functionals and distributions of vector-valued Rademacher sums"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Seed for Monte Carlo and dual-sphere search");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", g.out_dir, "Output directory");
  app.add_option("--exact-max-n", g.exact_max_n, "Largest N for exact enumeration (default 24)");

  std::string coeffs, space = "linf", grid, scenario, out, p_grid = "1,2,4,8,16", q_grid = "2.5,3,4,6";
  double p = 2.0;
  std::size_t column = 1;
  bool exact = false, mc = false;
  std::uint64_t samples = 100000;

  auto* kfun = app.add_subcommand("kfun", "K_{1,2}(a, t) of one coefficient column on a t-grid");
  kfun->add_option("--coeffs", coeffs, "Coefficient CSV")->required();
  kfun->add_option("--t", grid, "t-grid: start:stop:step or comma list")->required();
  kfun->add_option("--column", column, "1-based column to use as the scalar sequence");

  auto* weak = app.add_subcommand("weaknorm", "Weak l_p norm of a coefficient family");
  weak->add_option("--coeffs", coeffs, "Coefficient CSV")->required();
  weak->add_option("--space", space, "linf | l1 | l2 | lp:<p>");
  weak->add_option("--p", p, "Exponent p >= 1");

  auto* prof = app.add_subcommand("kwprofile", "K^w_{1,2} profile on a t-grid");
  prof->add_option("--coeffs", coeffs, "Coefficient CSV")->required();
  prof->add_option("--space", space, "linf | l1 | l2 | lp:<p>");
  prof->add_option("--t-grid", grid, "t-grid: start:stop:step or comma list")->required();

  auto* dist = app.add_subcommand("dist", "Law of ||sum eps_n x_n||");
  dist->add_option("--coeffs", coeffs, "Coefficient CSV")->required();
  dist->add_option("--space", space, "linf | l1 | l2 | lp:<p>");
  auto* exact_flag = dist->add_flag("--exact", exact, "Enumerate all sign patterns (default)");
  auto* mc_flag = dist->add_flag("--mc", mc, "Monte Carlo sampling");
  exact_flag->excludes(mc_flag);
  dist->add_option("--samples", samples, "Monte Carlo sample count")->check(CLI::PositiveNumber);
  dist->add_option("--p-grid", p_grid, "Moment orders for the summary");
  dist->add_option("--q-grid", q_grid, "Orlicz exponents for the summary");

  auto* verify = app.add_subcommand("verify", "Run the checks of a scenario and write the report");
  verify->add_option("--scenario", scenario, "Scenario JSON")->required();
  verify->add_option("--out", out, "Report path (default <out-dir>/report.json)");

  auto* report = app.add_subcommand("report", "Run a scenario and write the full result bundle");
  report->add_option("--scenario", scenario, "Scenario JSON")->required();

  for (auto* sub : {kfun, weak, prof, dist, verify, report}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::InputError);
  }

  try {
    if (*kfun) return run_kfun(coeffs, grid, column);
    if (*weak) return run_weaknorm(coeffs, space, p, g);
    if (*prof) return run_kwprofile(coeffs, space, grid, g);
    if (*dist) return run_dist(coeffs, space, mc, samples, p_grid, q_grid, g);
    if (*verify) return run_verify(scenario, out, g);
    if (*report) return run_report(scenario, g);
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::CapacityError);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::InputError);
  } catch (const UnsupportedError& e) {
    std::cerr << "unsupported: " << e.what() << '\n';
    return static_cast<int>(ExitCode::InputError);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::InputError);
  }
  return 0;
}
