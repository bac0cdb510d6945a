#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "dichotomy/applications.hpp"
#include "dichotomy/criteria.hpp"
#include "dichotomy/errors.hpp"
#include "dichotomy/exact_engine.hpp"
#include "dichotomy/montecarlo.hpp"
#include "dichotomy/oracle.hpp"
#include "json.hpp"

namespace dichotomy::cli {

namespace {

enum class Format { json, csv, text };

struct RunConfig {
  std::string spec_path;
  std::string other_path;
  std::size_t horizon = 0;
  bool horizon_set = false;
  std::uint64_t seed = 0;
  std::size_t samples = 1000;
  std::string format;
  std::optional<double> delta;
  std::optional<std::size_t> bigm;
  double threshold = 10.0;
  unsigned threads = 0;
  std::string output_path;
  std::string csv_path;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read '" + path + "'");
  return ss.str();
}

CanonicalChain load_chain(const std::string& path) {
  if (path.empty()) throw std::invalid_argument("missing spec path");
  const std::string text = read_file(path);
  try {
    return canonicalize(parse_spec(text));
  } catch (const SchemaError& e) {
    // Prefix the file so diagnostics for --spec and --other stay apart.
    if (dynamic_cast<const NumericError*>(&e)) throw NumericError(path + ": " + e.where(), e.what());
    throw SchemaError(path + ": " + e.where(), e.what());
  }
}

Format resolve_format(const RunConfig& cfg, bool terminal) {
  if (cfg.format.empty()) return terminal ? Format::text : Format::json;
  if (cfg.format == "json") return Format::json;
  if (cfg.format == "csv") return Format::csv;
  return Format::text;
}

void require_format(Format f, std::initializer_list<Format> allowed, const char* command) {
  if (std::find(allowed.begin(), allowed.end(), f) == allowed.end())
    throw std::invalid_argument(std::string("format not supported by ") + command);
}

// ---------------------------------------------------------------------------

int cmd_validate(const RunConfig& cfg, Format fmt, std::ostream& out) {
  const CanonicalChain chain = load_chain(cfg.spec_path);
  if (fmt == Format::json) {
    nlohmann::json j = {{"valid", true},
                        {"sided", to_string(chain.sidedness)},
                        {"alphabet", chain.alphabet.symbols()},
                        {"states", chain.state_count()},
                        {"explicit_transitions", chain.transitions.explicit_length()},
                        {"tail", std::holds_alternative<ConstantTail>(chain.transitions.tail)
                                     ? "constant"
                                     : "power_perturbation"}};
    out << j.dump(2) << "\n";
  } else {
    out << "valid: " << cfg.spec_path << " (" << to_string(chain.sidedness) << "-sided, "
        << chain.state_count() << " working states, " << chain.transitions.explicit_length()
        << " explicit transitions)\n";
  }
  return kSuccess;
}

int cmd_decide(const RunConfig& cfg, Format fmt, std::ostream& out) {
  require_format(fmt, {Format::json, Format::text}, "decide");
  const CanonicalChain a = load_chain(cfg.spec_path);
  const CanonicalChain b = load_chain(cfg.other_path);
  DecideOptions options;
  options.delta = cfg.delta;
  options.window = cfg.bigm;
  if (cfg.horizon_set) options.evidence_horizon = cfg.horizon;
  const DecisionReport report = decide(a, b, options);
  out << (fmt == Format::json ? report_to_json(report) + "\n" : report_to_text(report));
  return kSuccess;
}

int cmd_hellinger(const RunConfig& cfg, Format fmt, std::ostream& out) {
  const CanonicalChain a = load_chain(cfg.spec_path);
  const CanonicalChain b = load_chain(cfg.other_path);
  const std::size_t horizon = cfg.horizon_set ? cfg.horizon : 100;
  const std::vector<double> h = hellinger_trajectory(a, b, horizon);
  std::vector<double> sums(horizon);
  CompensatedAccumulator acc;
  for (std::size_t n = 1; n <= horizon; ++n) {
    acc.add(d_n_squared(transition_at(a, n), transition_at(b, n)));
    sums[n - 1] = acc.value();
  }
  const auto old_precision = out.precision(17);
  if (fmt == Format::csv) {
    out << "n,H_n,partial_sum_D2\n";
    for (std::size_t n = 1; n <= horizon; ++n)
      out << n << ',' << h[n - 1] << ',' << sums[n - 1] << '\n';
  } else if (fmt == Format::json) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t n = 1; n <= horizon; ++n)
      rows.push_back({{"n", n}, {"H_n", h[n - 1]}, {"partial_sum_D2", sums[n - 1]}});
    out << rows.dump(2) << "\n";
  } else {
    out << std::setw(8) << "n" << std::setw(26) << "H_n" << std::setw(26) << "sum D_k^2" << "\n";
    for (std::size_t n = 1; n <= horizon; ++n)
      out << std::setw(8) << n << std::setw(26) << h[n - 1] << std::setw(26) << sums[n - 1]
          << "\n";
  }
  out.precision(old_precision);
  return kSuccess;
}

int cmd_simulate(const RunConfig& cfg, Format fmt, std::ostream& out) {
  const CanonicalChain a = load_chain(cfg.spec_path);
  const CanonicalChain b = load_chain(cfg.other_path);
  const std::size_t horizon = cfg.horizon_set ? cfg.horizon : 100;
  if (horizon == 0) throw std::invalid_argument("simulate needs --horizon >= 1");
  if (fmt == Format::csv) {
    const TrajectoryBatch batch = loglr_trajectories(a, b, horizon, cfg.samples, cfg.seed, cfg.threads);
    write_trajectory_csv(out, batch);
    return kSuccess;
  }
  const LogLrSummary s = loglr_summary(a, b, horizon, cfg.samples, cfg.seed, cfg.threshold, cfg.threads);
  if (fmt == Format::json) {
    out << summary_to_json(s) << "\n";
  } else {
    out << "paths:                 " << s.count << " (seed " << s.seed << ", horizon "
        << s.horizon << ")\n";
    out << "P(log z_n < -" << s.threshold << "): " << s.fraction_below << "\n";
    out << "mean z_n:              " << s.mean_z << " +/- " << s.confidence_radius << "\n";
    out << "z_n = 0 paths:         " << s.sentinel_count << "\n";
  }
  return kSuccess;
}

int cmd_shift(const RunConfig& cfg, Format fmt, std::ostream& out) {
  require_format(fmt, {Format::json, Format::text}, "shift");
  const ShiftReport r =
      shift_analysis(load_chain(cfg.spec_path), cfg.horizon_set ? cfg.horizon : 1000);
  out << (fmt == Format::json ? shift_report_to_json(r) + "\n" : shift_report_to_text(r));
  return kSuccess;
}

int cmd_stationarize(const RunConfig& cfg, Format fmt, std::ostream& out) {
  require_format(fmt, {Format::json, Format::text}, "stationarize");
  const StationarizationReport r =
      stationarize(load_chain(cfg.spec_path), std::nullopt, cfg.horizon_set ? cfg.horizon : 1000);
  if (!cfg.output_path.empty() && r.stationary_spec) {
    std::ofstream file(cfg.output_path);
    if (!file) throw IoError("cannot write '" + cfg.output_path + "'");
    file << serialize_spec(*r.stationary_spec);
  }
  out << (fmt == Format::json ? stationarization_report_to_json(r) + "\n"
                              : stationarization_report_to_text(r));
  return kSuccess;
}

struct Comparison {
  explicit Comparison(std::string n) : name(std::move(n)) {}
  std::string name;
  double deviation = 0.0;
  bool skipped = false;
  std::string note;
};

double max_dev(const Vector& x, const Vector& y) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
  return d;
}

double max_dev(const Matrix& x, const Matrix& y) { return max_dev(x.data(), y.data()); }

int cmd_oracle_check(const RunConfig& cfg, Format fmt, std::ostream& out) {
  require_format(fmt, {Format::json, Format::text}, "oracle-check");
  const CanonicalChain a = load_chain(cfg.spec_path);
  const CanonicalChain b = load_chain(cfg.other_path);
  require_compatible(a, b);
  const std::size_t n = cfg.horizon_set ? cfg.horizon : 6;
  if (n == 0) throw std::invalid_argument("oracle-check needs --horizon >= 1");
  if (std::pow(static_cast<double>(a.state_count()), static_cast<double>(n)) >
      static_cast<double>(kOracleGuard))
    throw GuardError("horizon " + std::to_string(n) + " exceeds the enumeration guard");

  constexpr double tolerance = 1e-12;
  std::vector<Comparison> rows;
  for (const auto* chain : {&a, &b}) {
    const std::string tag = chain == &a ? "A" : "B";
    Comparison marg{"marginal[" + tag + "]"};
    Comparison pair{"pair_probability[" + tag + "]"};
    for (std::size_t m = 1; m <= n; ++m) {
      marg.deviation = std::max(marg.deviation, max_dev(marginal(*chain, m), oracle_marginal(*chain, m)));
      for (std::size_t k = 1; k < m; ++k)
        pair.deviation = std::max(
            pair.deviation, max_dev(pair_distribution(*chain, k, m), oracle_pair_distribution(*chain, k, m)));
    }
    rows.push_back(marg);
    if (n >= 2) rows.push_back(pair);
  }
  Comparison hell{"hellinger_integral"};
  for (std::size_t m = 1; m <= n; ++m)
    hell.deviation =
        std::max(hell.deviation, std::abs(hellinger_integral(a, b, m) - oracle_hellinger(a, b, m)));
  rows.push_back(hell);

  Comparison zm{"z_mean"};
  if (loc_abs_continuous(a, b)) {
    zm.deviation = std::abs(z_mean(a, b, n) - oracle_z_mean(a, b, n));
  } else {
    zm.skipped = true;
    zm.note = "A is not locally absolutely continuous w.r.t. B";
  }
  rows.push_back(zm);

  if (n >= 2) {
    Comparison lh{"local_hellinger_identity"};
    if (loc_abs_continuous(a, b)) {
      for (const auto& rec : oracle_local_hellinger(a, b, n))
        lh.deviation = std::max(lh.deviation,
                                std::abs(rec.value - local_hellinger(a, b, n - 1, rec.last_state)));
    } else {
      lh.skipped = true;
      lh.note = "A is not locally absolutely continuous w.r.t. B";
    }
    rows.push_back(lh);
  }

  if (!cfg.csv_path.empty()) {
    std::ofstream file(cfg.csv_path);
    if (!file) throw IoError("cannot write '" + cfg.csv_path + "'");
    write_path_csv(file, a, b, n);
  }

  bool all_pass = true;
  for (const auto& r : rows) all_pass = all_pass && (r.skipped || r.deviation <= tolerance);
  if (fmt == Format::json) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json row = {{"comparison", r.name},
                            {"max_abs_deviation", r.deviation},
                            {"status", r.skipped ? "skipped" : (r.deviation <= tolerance ? "pass" : "fail")}};
      if (!r.note.empty()) row["note"] = r.note;
      j.push_back(row);
    }
    out << nlohmann::json{{"horizon", n}, {"tolerance", tolerance}, {"comparisons", j},
                          {"pass", all_pass}}
               .dump(2)
        << "\n";
  } else {
    for (const auto& r : rows) {
      out << std::left << std::setw(28) << r.name << std::right;
      if (r.skipped) {
        out << "skipped (" << r.note << ")\n";
      } else {
        out << std::setw(14) << std::scientific << std::setprecision(3) << r.deviation
            << std::defaultfloat << "  " << (r.deviation <= tolerance ? "pass" : "FAIL") << "\n";
      }
    }
  }
  return all_pass ? kSuccess : kAnalysisError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        bool stdout_is_terminal) {
  CLI::App app{"Equivalence and singularity of non-stationary Markov measures", "dichotomy"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub, bool pair) {
    sub->add_option("--spec", cfg.spec_path, "Spec file (measure A)")->required();
    if (pair) sub->add_option("--other", cfg.other_path, "Spec file (measure B)")->required();
    sub->add_option("--format", cfg.format, "Output format")
        ->check(CLI::IsMember({"json", "csv", "text"}));
  };
  auto add_horizon = [&](CLI::App* sub, const char* help) {
    sub->add_option_function<std::size_t>(
        "--horizon", [&](const std::size_t& h) { cfg.horizon = h; cfg.horizon_set = true; }, help);
  };

  auto* validate_cmd = app.add_subcommand("validate", "Validate a spec file");
  add_common(validate_cmd, false);

  auto* decide_cmd = app.add_subcommand("decide", "Decide equivalence or mutual singularity");
  add_common(decide_cmd, true);
  add_horizon(decide_cmd, "Horizon for partial-sum evidence");
  decide_cmd->add_option("--delta", cfg.delta, "delta for the class S certificate")
      ->check(CLI::Range(0.0, 0.5));
  decide_cmd->add_option("--bigm", cfg.bigm, "window length M for the class S certificate")
      ->check(CLI::PositiveNumber);

  auto* hellinger_cmd = app.add_subcommand("hellinger", "Hellinger integral trajectory");
  add_common(hellinger_cmd, true);
  add_horizon(hellinger_cmd, "Last n in the table (default 100)");

  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo log-likelihood ratios under B");
  add_common(simulate_cmd, true);
  add_horizon(simulate_cmd, "Path length (default 100)");
  simulate_cmd->add_option("--samples", cfg.samples, "Number of paths")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--seed", cfg.seed, "Random seed");
  simulate_cmd->add_option("--threshold", cfg.threshold, "T in P(log z_n < -T)");
  simulate_cmd->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");

  auto* shift_cmd = app.add_subcommand("shift", "Non-singularity of the left shift");
  add_common(shift_cmd, false);
  add_horizon(shift_cmd, "Horizon for partial-sum evidence");

  auto* stat_cmd = app.add_subcommand("stationarize", "Equivalent stationary Markov measure");
  add_common(stat_cmd, false);
  add_horizon(stat_cmd, "Horizon for partial-sum evidence");
  stat_cmd->add_option("--output", cfg.output_path, "Write the stationary spec here");

  auto* oracle_cmd = app.add_subcommand("oracle-check", "Compare DP results with enumeration");
  add_common(oracle_cmd, true);
  add_horizon(oracle_cmd, "Path length n (default 6)");
  oracle_cmd->add_option("--csv", cfg.csv_path, "Dump the path table as CSV");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kAnalysisError;
  }

  const Format fmt = resolve_format(cfg, stdout_is_terminal);
  try {
    if (*validate_cmd) return cmd_validate(cfg, fmt, out);
    if (*decide_cmd) return cmd_decide(cfg, fmt, out);
    if (*hellinger_cmd) return cmd_hellinger(cfg, fmt, out);
    if (*simulate_cmd) return cmd_simulate(cfg, fmt, out);
    if (*shift_cmd) return cmd_shift(cfg, fmt, out);
    if (*stat_cmd) return cmd_stationarize(cfg, fmt, out);
    if (*oracle_cmd) return cmd_oracle_check(cfg, fmt, out);
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kIoError;
  } catch (const SchemaError& e) {
    err << "invalid spec: " << e.what() << "\n";
    return kSchemaError;
  } catch (const GuardError& e) {
    err << "guard: " << e.what() << "\n";
    return kGuardError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kAnalysisError;
  }
  return kAnalysisError;
}

}  // namespace dichotomy::cli
