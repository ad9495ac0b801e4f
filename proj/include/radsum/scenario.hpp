#pragma once

#include "radsum/distribution.hpp"
#include "radsum/spaces.hpp"
#include "radsum/verifier.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace radsum {

inline constexpr const char* kVersion = "0.1.0";

struct Scenario {
  SpaceSpec space = SpaceSpec::linf(1);
  CoefficientFamily family = CoefficientFamily::scalar(std::vector<double>{1.0});
  // "inline" or the resolved CSV path
  std::string coefficients_source = "inline";
  bool exact = true;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::size_t exact_max_n = kDefaultExactMaxN;
  unsigned threads = 1;
  VerifyGrids grids = default_grids();
  std::vector<std::string> checks;
  std::filesystem::path out_dir = "out";
  // Canonical form of every setting that affects numeric output.
  nlohmann::ordered_json canonical;
  std::string hash;
};

// Command-line flags that take precedence over the file.
struct ScenarioOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::size_t> exact_max_n;
};

// Parses and validates a scenario. Relative CSV paths resolve against
// `base_dir`. Validation problems are collected and reported together.
Scenario parse_scenario(const nlohmann::json& config, const std::filesystem::path& base_dir,
                        const ScenarioOverrides& overrides = {});
Scenario load_scenario(const std::filesystem::path& path, const ScenarioOverrides& overrides = {});

struct ResultBundle {
  DistSummary dist;
  KProfile profile;
  std::vector<CheckRecord> checks;
  nlohmann::ordered_json report;
  nlohmann::ordered_json summary;
  std::vector<std::filesystem::path> files;
  bool all_pass = true;
};

// Distribution, then K^w profile, then the requested checks. Errors are
// rethrown with the failing stage named.
ResultBundle run_scenario(const Scenario& s);

// Writes dist.csv, dist_summary.json, kprofile.csv, report.json and the plot
// data files into s.out_dir; records the paths in bundle.files.
void write_bundle(const Scenario& s, ResultBundle& bundle);

// Two-column plot data; no files when the matching checks did not run.
void emit_plotdata(const Scenario& s, ResultBundle& bundle);

nlohmann::ordered_json report_json(const Scenario& s, const std::vector<CheckRecord>& checks);
nlohmann::ordered_json dist_summary_json(const DistSummary& d, const std::vector<double>& p_grid,
                                         const std::vector<double>& q_grid);
std::string dist_csv(const DistSummary& d, const std::string& header_comment);
std::string kprofile_csv(const KProfile& prof, const std::string& header_comment);

// Grid text: "start:stop:step" or a comma-separated list.
std::vector<double> parse_grid(const std::string& text);

} // namespace radsum
