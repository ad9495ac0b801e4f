#include "radsum/scenario.hpp"

#include "radsum/csv_io.hpp"
#include "radsum/errors.hpp"
#include "radsum/random.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace radsum {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

std::vector<double> range_grid(double start, double stop, double step) {
  if (!(step > 0.0) || !(stop >= start)) throw InputError("range grid needs step > 0 and stop >= start");
  const double n = std::floor((stop - start) / step + 1e-9);
  if (n > 1e6) throw InputError("range grid has too many points");
  std::vector<double> out;
  for (std::size_t i = 0; i <= static_cast<std::size_t>(n); ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

bool is_nonnegative_integer(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

bool strictly_increasing(const std::vector<double>& g) {
  for (std::size_t i = 1; i < g.size(); ++i)
    if (!(g[i] > g[i - 1])) return false;
  return true;
}

std::vector<double> grid_from_json(const json& v, const std::string& name, std::vector<std::string>& problems) {
  try {
    if (v.is_array()) {
      std::vector<double> g;
      for (const auto& x : v) {
        if (!x.is_number()) throw InputError("");
        g.push_back(x.get<double>());
      }
      return g;
    }
    if (v.is_object()) return range_grid(v.at("start").get<double>(), v.at("stop").get<double>(), v.at("step").get<double>());
    if (v.is_string()) return parse_grid(v.get<std::string>());
  } catch (const std::exception&) {
  }
  problems.push_back("grids." + name + ": expected a number array, {start, stop, step} or \"start:stop:step\"");
  return {};
}

std::string header_comment(const Scenario& s, const std::string& instance) {
  return std::string("# radsum ") + kVersion + " scenario=" + s.hash + " instance=" + instance;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw InputError("error while writing '" + path.string() + "'");
}

std::string two_column(const std::string& comment, const std::vector<SeriesPoint>& pts) {
  std::ostringstream os;
  os << comment << '\n';
  for (const auto& p : pts) os << format_double(p.param) << ' ' << format_double(p.value) << '\n';
  return os.str();
}

const CheckRecord* find_check(const std::vector<CheckRecord>& checks, const std::string& id) {
  for (const auto& c : checks)
    if (c.id == id && !c.skipped) return &c;
  return nullptr;
}

// JSON has no infinity; finite values pass through unchanged.
ordered_json num(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? ordered_json("nan") : ordered_json(x > 0 ? "inf" : "-inf");
}

} // namespace

std::vector<double> parse_grid(const std::string& text) {
  if (std::count(text.begin(), text.end(), ':') == 2) {
    std::stringstream ss(text);
    std::string a, b, c;
    std::getline(ss, a, ':');
    std::getline(ss, b, ':');
    std::getline(ss, c, ':');
    try {
      return range_grid(std::stod(a), std::stod(b), std::stod(c));
    } catch (const std::invalid_argument&) {
      throw InputError("cannot parse grid '" + text + "'");
    }
  }
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw InputError("cannot parse grid value '" + item + "' in '" + text + "'");
    }
  }
  if (out.empty()) throw InputError("empty grid '" + text + "'");
  return out;
}

Scenario parse_scenario(const json& config, const std::filesystem::path& base_dir, const ScenarioOverrides& overrides) {
  if (!config.is_object()) throw InputError("scenario must be a JSON object");
  std::vector<std::string> problems;
  static const std::set<std::string> known{"space",   "coefficients", "coefficients_csv", "mode",    "seed",
                                           "threads", "exact_max_n",  "grids",            "checks",  "out_dir"};
  for (const auto& [key, _] : config.items())
    if (!known.count(key)) problems.push_back("unknown field '" + key + "'");

  Scenario s;

  // coefficients
  std::vector<std::vector<double>> rows;
  const bool has_inline = config.contains("coefficients");
  const bool has_csv = config.contains("coefficients_csv");
  if (has_inline == has_csv) {
    problems.push_back("exactly one of 'coefficients' (inline matrix) or 'coefficients_csv' is required");
  } else if (has_inline) {
    const json& c = config["coefficients"];
    bool ok = c.is_array() && !c.empty();
    if (ok) {
      for (const auto& r : c) {
        std::vector<double> row;
        if (r.is_number()) {
          row.push_back(r.get<double>());
        } else if (r.is_array()) {
          for (const auto& x : r) {
            if (!x.is_number()) {
              ok = false;
              break;
            }
            row.push_back(x.get<double>());
          }
        } else {
          ok = false;
        }
        rows.push_back(std::move(row));
      }
    }
    if (!ok) problems.push_back("coefficients: expected a non-empty array of number rows (or numbers for a scalar family)");
  } else if (!config["coefficients_csv"].is_string()) {
    problems.push_back("coefficients_csv: expected a path string");
  } else {
    std::filesystem::path p = config["coefficients_csv"].get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    if (!std::filesystem::exists(p)) {
      problems.push_back("coefficients_csv: file not found: " + p.string());
    } else {
      try {
        rows = read_coefficients_csv(p);
        s.coefficients_source = p.string();
      } catch (const InputError& e) {
        problems.push_back(std::string("coefficients_csv: ") + e.what());
      }
    }
  }
  const std::size_t dim = rows.empty() ? 0 : rows.front().size();

  // space
  if (!config.contains("space")) {
    problems.push_back("space: required (e.g. \"linf\", \"l1\", \"l2\", \"lp:3\")");
  } else if (dim > 0) {
    try {
      const json& sp = config["space"];
      if (sp.is_string()) {
        s.space = SpaceSpec::parse(sp.get<std::string>(), dim);
      } else if (sp.is_object()) {
        std::string fam = sp.at("family").get<std::string>();
        if (sp.contains("p")) {
          if (fam != "lp" && fam != "LP") throw InputError("'p' is only meaningful for the lp family");
          fam += ":" + format_double(sp.at("p").get<double>());
        }
        s.space = SpaceSpec::parse(fam, dim);
        if (sp.contains("dim") && sp.at("dim").get<std::size_t>() != dim)
          throw InputError("space.dim does not match the " + std::to_string(dim) + " coefficient columns");
      } else {
        throw InputError("expected a string or {family, p}");
      }
    } catch (const InputError& e) {
      problems.push_back(std::string("space: ") + e.what());
    } catch (const json::exception&) {
      problems.push_back("space: expected a string or {family, p}");
    }
  }

  // mode
  if (config.contains("mode")) {
    const json& m = config["mode"];
    std::string kind;
    if (m.is_string()) kind = m.get<std::string>();
    else if (m.is_object() && m.contains("kind") && m["kind"].is_string()) kind = m["kind"].get<std::string>();
    if (kind == "exact") {
      s.exact = true;
    } else if (kind == "mc") {
      s.exact = false;
      s.samples = 100000;
      if (m.is_object() && m.contains("samples")) {
        if (!is_nonnegative_integer(m["samples"]) || m["samples"].get<std::uint64_t>() == 0)
          problems.push_back("mode.samples: expected a positive integer");
        else
          s.samples = m["samples"].get<std::uint64_t>();
      }
      if (m.is_object() && m.contains("seed")) {
        if (!is_nonnegative_integer(m["seed"])) problems.push_back("mode.seed: expected a nonnegative integer");
        else s.seed = m["seed"].get<std::uint64_t>();
      }
    } else {
      problems.push_back("mode: expected \"exact\", \"mc\" or {kind, samples, seed}");
    }
  }
  auto read_uint = [&](const char* key, auto& target) {
    if (!config.contains(key)) return;
    if (!is_nonnegative_integer(config[key])) problems.push_back(std::string(key) + ": expected a nonnegative integer");
    else target = config[key].get<std::remove_reference_t<decltype(target)>>();
  };
  read_uint("seed", s.seed);
  read_uint("exact_max_n", s.exact_max_n);
  read_uint("threads", s.threads);

  // grids
  if (config.contains("grids")) {
    const json& g = config["grids"];
    if (!g.is_object()) {
      problems.push_back("grids: expected an object");
    } else {
      std::map<std::string, std::vector<double>*> slots{{"t", &s.grids.t},         {"cor1_t", &s.grids.cor1_t},
                                                        {"p", &s.grids.p},         {"q", &s.grids.q},
                                                        {"s", &s.grids.s},         {"lambda", &s.grids.lambda},
                                                        {"thresholds", &s.grids.thresholds}};
      for (const auto& [key, value] : g.items()) {
        auto it = slots.find(key);
        if (it == slots.end()) {
          problems.push_back("grids: unknown grid '" + key + "'");
          continue;
        }
        *it->second = grid_from_json(value, key, problems);
      }
    }
  }
  auto check_grid = [&](const std::string& name, const std::vector<double>& g, auto valid, const char* rule) {
    if (!strictly_increasing(g)) problems.push_back("grids." + name + ": must be strictly increasing");
    for (double x : g)
      if (!valid(x)) {
        problems.push_back("grids." + name + ": " + rule);
        break;
      }
  };
  check_grid("t", s.grids.t, [](double x) { return x >= 0.0 && std::isfinite(x); }, "values must be >= 0");
  check_grid("cor1_t", s.grids.cor1_t, [](double x) { return x > 0.0 && x <= 0.1; }, "values must lie in (0, 0.1]");
  check_grid("p", s.grids.p, [](double x) { return x >= 1.0 && std::isfinite(x); }, "values must be >= 1");
  check_grid("q", s.grids.q, [](double x) { return x > 1.0 && std::isfinite(x); }, "values must exceed 1");
  check_grid("s", s.grids.s, [](double x) { return x >= 1.0 && std::isfinite(x); }, "values must be >= 1");
  check_grid("lambda", s.grids.lambda, [](double x) { return x > 0.0 && x < 1.0; }, "values must lie in (0, 1)");
  check_grid("thresholds", s.grids.thresholds, [](double x) { return x > 0.0 && std::isfinite(x); },
             "values must be positive");

  // checks
  if (config.contains("checks")) {
    const json& c = config["checks"];
    if (!c.is_array()) {
      problems.push_back("checks: expected an array of check ids");
    } else {
      for (const auto& id : c) {
        if (!id.is_string()) {
          problems.push_back("checks: ids must be strings");
          continue;
        }
        std::string v = id.get<std::string>();
        if (std::find(check_ids().begin(), check_ids().end(), v) == check_ids().end())
          problems.push_back("checks: unknown check id '" + v + "' (known: " + join(check_ids(), ", ") + ")");
        else
          s.checks.push_back(v);
      }
    }
  } else {
    s.checks = check_ids();
  }
  if (config.contains("out_dir")) {
    if (!config["out_dir"].is_string()) problems.push_back("out_dir: expected a path string");
    else s.out_dir = config["out_dir"].get<std::string>();
  }

  if (overrides.seed) s.seed = *overrides.seed;
  if (overrides.threads) s.threads = *overrides.threads;
  if (overrides.out_dir) s.out_dir = *overrides.out_dir;
  if (overrides.exact_max_n) s.exact_max_n = *overrides.exact_max_n;

  if (!problems.empty()) throw InputError("invalid scenario:\n  - " + join(problems, "\n  - "));

  try {
    s.family = CoefficientFamily(s.space, rows);
  } catch (const InputError& e) {
    throw InputError(std::string("invalid scenario:\n  - coefficients: ") + e.what());
  }

  ordered_json canon;
  canon["space"] = s.space.to_string();
  canon["coefficients"] = rows;
  canon["mode"] = s.exact ? "exact" : "mc";
  canon["samples"] = s.samples;
  canon["seed"] = s.seed;
  canon["exact_max_n"] = s.exact_max_n;
  canon["grids"] = {{"t", s.grids.t},           {"cor1_t", s.grids.cor1_t}, {"p", s.grids.p},
                    {"q", s.grids.q},           {"s", s.grids.s},           {"lambda", s.grids.lambda},
                    {"thresholds", s.grids.thresholds}};
  canon["checks"] = s.checks;
  s.canonical = canon;
  s.hash = digest_hex(canon.dump());
  return s;
}

Scenario load_scenario(const std::filesystem::path& path, const ScenarioOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw InputError("scenario file not found: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json config;
  try {
    config = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError(path.string() + ":" + std::to_string(line) + ":" + std::to_string(col) +
                     ": JSON parse error: " + e.what());
  }
  return parse_scenario(config, path.parent_path(), overrides);
}

ordered_json dist_summary_json(const DistSummary& d, const std::vector<double>& p_grid,
                               const std::vector<double>& q_grid) {
  ordered_json j;
  j["kind"] = to_string(d.kind());
  j["n_terms"] = d.n_terms;
  j["atoms"] = d.size();
  j["denominator"] = d.total();
  if (d.kind() == DistKind::Empirical) {
    j["samples"] = d.sample_count;
    j["seed"] = d.seed;
  }
  j["mean"] = num(mean(d));
  j["median"] = num(median(d));
  j["max"] = num(d.max());
  ordered_json moments = ordered_json::array(), weak = ordered_json::array(), orl = ordered_json::array();
  for (double p : p_grid) {
    moments.push_back({{"p", p}, {"value", num(moment(d, p))}});
    weak.push_back({{"p", p}, {"value", num(weak_lp_rv(d, p))}});
  }
  for (double q : q_grid) orl.push_back({{"q", q}, {"value", num(orlicz_norm(d, q))}});
  j["moments"] = moments;
  j["weak_lp"] = weak;
  j["orlicz"] = orl;
  return j;
}

std::string dist_csv(const DistSummary& d, const std::string& header_comment) {
  std::ostringstream os;
  if (!header_comment.empty()) os << header_comment << '\n';
  os << "value,probability,cumulative\n";
  for (std::size_t i = 0; i < d.size(); ++i)
    os << format_double(d.values()[i]) << ',' << format_double(d.probability(i)) << ','
       << format_double(d.cumulative(i)) << '\n';
  return os.str();
}

std::string kprofile_csv(const KProfile& prof, const std::string& header_comment) {
  std::ostringstream os;
  if (!header_comment.empty()) os << header_comment << '\n';
  const std::size_t m = prof.points.empty() ? 0 : prof.points.front().witness.vector.size();
  os << "t,kw,exactness";
  for (std::size_t j = 0; j < m; ++j) os << ",witness_" << j + 1;
  os << '\n';
  for (const auto& k : prof.points) {
    os << format_double(k.t) << ',' << format_double(k.value) << ',' << to_string(k.exactness);
    for (double w : k.witness.vector) os << ',' << format_double(w);
    os << '\n';
  }
  return os.str();
}

ordered_json report_json(const Scenario& s, const std::vector<CheckRecord>& checks) {
  ordered_json j;
  j["provenance"] = {{"tool", "radsum"},
                     {"version", kVersion},
                     {"scenario_hash", s.hash},
                     {"instance_hash", instance_hash(s.family)},
                     {"space", s.space.to_string()},
                     {"n_terms", s.family.size()},
                     {"mode", s.exact ? "exact" : "mc"},
                     {"seed", s.seed}};
  ordered_json arr = ordered_json::array();
  std::size_t passed = 0, failed = 0, skipped = 0;
  for (const auto& c : checks) {
    ordered_json r;
    r["id"] = c.id;
    r["instance_hash"] = c.instance_hash;
    r["instance"] = c.instance;
    r["status"] = c.skipped ? "SKIPPED" : (c.pass ? "PASS" : "FAIL");
    r["worst_margin"] = num(c.worst_margin);
    ordered_json margins = ordered_json::array();
    for (const auto& m : c.margins) margins.push_back({{"label", m.label}, {"param", num(m.param)}, {"margin", num(m.margin)}});
    r["margins"] = margins;
    ordered_json fitted = ordered_json::object();
    for (const auto& [k, v] : c.fitted) fitted[k] = num(v);
    r["fitted"] = fitted;
    ordered_json wit = ordered_json::object();
    for (const auto& [k, v] : c.witness) wit[k] = num(v);
    r["witness"] = wit;
    ordered_json series = ordered_json::object();
    for (const auto& [name, pts] : c.series) {
      ordered_json a = ordered_json::array();
      for (const auto& p : pts) a.push_back({num(p.param), num(p.value)});
      series[name] = a;
    }
    r["series"] = series;
    r["notes"] = c.notes;
    arr.push_back(r);
    if (c.skipped) ++skipped;
    else if (c.pass) ++passed;
    else ++failed;
  }
  j["checks"] = arr;
  j["summary"] = {{"total", checks.size()}, {"passed", passed}, {"failed", failed}, {"skipped", skipped},
                  {"all_pass", failed == 0}};
  return j;
}

ResultBundle run_scenario(const Scenario& s) {
  auto stage = [](const char* name, auto&& fn) {
    try {
      return fn();
    } catch (const CapacityError& e) {
      throw CapacityError(std::string("stage ") + name + ": " + e.what());
    } catch (const InputError& e) {
      throw InputError(std::string("stage ") + name + ": " + e.what());
    } catch (const UnsupportedError& e) {
      throw UnsupportedError(std::string("stage ") + name + ": " + e.what());
    }
  };

  DistSummary dist = stage("dist", [&] {
    if (s.exact) {
      EnumerationOptions eo;
      eo.max_n = s.exact_max_n;
      eo.threads = s.threads;
      return enumerate_exact(s.family, eo);
    }
    return sample_mc(s.family, s.samples, s.seed, s.threads);
  });

  WeakNormOptions wo;
  wo.ascent.seed = derive_seed(s.seed, 1);
  KProfile profile = stage("kwprofile", [&] { return kw_profile(s.family, s.grids.t, wo); });

  Model model(s.family, dist, wo);
  std::vector<CheckRecord> checks = stage("verify", [&] { return run_checks(model, s.grids, s.checks); });

  ResultBundle b{std::move(dist), std::move(profile), std::move(checks), {}, {}, {}, true};
  b.report = report_json(s, b.checks);
  b.all_pass = b.report["summary"]["all_pass"].get<bool>();
  b.summary = dist_summary_json(b.dist, s.grids.p, s.grids.q);
  b.summary["provenance"] = b.report["provenance"];
  return b;
}

void emit_plotdata(const Scenario& s, ResultBundle& bundle) {
  const std::string comment = header_comment(s, instance_hash(s.family));
  if (const CheckRecord* c = find_check(bundle.checks, "main_upper")) {
    auto p1 = s.out_dir / "main_upper_tail.dat";
    auto p2 = s.out_dir / "main_upper_envelope.dat";
    write_text(p1, two_column(comment + " columns: t P(S>2ES+6K^w(t))", c->series.at("tail")));
    write_text(p2, two_column(comment + " columns: t 4exp(-t^2/8)", c->series.at("envelope")));
    bundle.files.push_back(p1);
    bundle.files.push_back(p2);
  }
  if (const CheckRecord* c = find_check(bundle.checks, "cor1")) {
    auto p1 = s.out_dir / "cor1_rearrangement.dat";
    auto p2 = s.out_dir / "cor1_envelope.dat";
    write_text(p1, two_column(comment + " columns: t S*(t)", c->series.at("rearrangement")));
    write_text(p2, two_column(comment + " columns: t ES+K^w(sqrt(log(1/t)))", c->series.at("mean_plus_kw")));
    bundle.files.push_back(p1);
    bundle.files.push_back(p2);
  }
}

void write_bundle(const Scenario& s, ResultBundle& bundle) {
  std::error_code ec;
  std::filesystem::create_directories(s.out_dir, ec);
  if (ec) throw InputError("cannot create output directory '" + s.out_dir.string() + "': " + ec.message());
  const std::string comment = header_comment(s, instance_hash(s.family));
  auto put = [&](const char* name, const std::string& text) {
    auto p = s.out_dir / name;
    write_text(p, text);
    bundle.files.push_back(p);
  };
  put("dist.csv", dist_csv(bundle.dist, comment));
  put("dist_summary.json", bundle.summary.dump(2) + "\n");
  put("kprofile.csv", kprofile_csv(bundle.profile, comment));
  put("report.json", bundle.report.dump(2) + "\n");
  emit_plotdata(s, bundle);
}

} // namespace radsum
