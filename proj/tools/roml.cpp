// roml: reproducible experiments on frequency moments, promise
// set-disjointness, and the stream-assembly protocol connecting them.
//
// Every command is a pure function of its flags; rerunning with the same
// flags reproduces output files byte for byte.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "roml/csvio.hpp"
#include "roml/diagnostics.hpp"
#include "roml/disjointness.hpp"
#include "roml/errors.hpp"
#include "roml/intervals.hpp"
#include "roml/parallel.hpp"
#include "roml/params.hpp"
#include "roml/protocol.hpp"
#include "roml/rng.hpp"
#include "roml/version.hpp"

namespace {

using namespace roml;

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInvariant = 3;

struct CliConfig {
  std::uint64_t n = 1'000'000;
  int k = 3;
  Ratio c{1, 2};
  Ratio c1{1, 1000};
  Ratio c2{1, 200};
  std::uint64_t t_factor = 100;
  std::uint64_t seed = 1;
  std::uint64_t trials = 1000;
  std::uint64_t batches = 100;
  std::string out;
  std::string format;  // resolved per command: gen-instance json, else csv
  std::string estimator = "exact";
  std::uint32_t samples = 4096;
  std::string kind = "yes";
  std::string instance_path;
  std::string export_stream;
};

std::uint64_t parse_scale(const std::string& text) {
  // Accepts plain integers and scientific forms like 1e6.
  std::size_t used = 0;
  const double v = std::stod(text, &used);
  if (used != text.size() || v < 1 || v > 9e18 || v != std::floor(v)) {
    throw InvalidScaleError("cannot parse integer scale '" + text + "'");
  }
  return static_cast<std::uint64_t>(v);
}

std::string config_echo(const std::string& command, const CliConfig& cfg,
                        bool with_trials, bool with_batches) {
  std::ostringstream os;
  os << "# roml " << kVersion << "\n";
  os << "# command=" << command << " n=" << cfg.n << " k=" << cfg.k
     << " c=" << cfg.c.str() << " c1=" << cfg.c1.str() << " c2=" << cfg.c2.str()
     << " t_factor=" << cfg.t_factor << " seed=" << cfg.seed;
  if (with_trials) os << " trials=" << cfg.trials;
  if (with_batches) os << " batches=" << cfg.batches;
  if (command == "protocol") {
    os << " estimator=" << cfg.estimator << " samples=" << cfg.samples;
  }
  if (command == "gen-instance" || command == "build-stream") {
    os << " kind=" << cfg.kind;
  }
  os << " format=" << cfg.format << "\n";
  return os.str();
}

void emit(const CliConfig& cfg, const std::string& payload) {
  if (cfg.out.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream file(cfg.out, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open output file " + cfg.out);
  file << payload;
  if (!file) throw std::runtime_error("short write to " + cfg.out);
}

// One report envelope for csv and json output: echoed config, named columns,
// canonically formatted cell strings.
struct Report {
  std::string command;
  CliConfig cfg;
  bool with_trials = false, with_batches = false;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> summary_lines;  // csv comments at the end

  std::string render() const {
    if (cfg.format == "json") {
      nlohmann::ordered_json j;
      j["roml"] = std::string(kVersion);
      std::istringstream echo(config_echo(command, cfg, with_trials, with_batches));
      std::string line;
      std::getline(echo, line);
      std::getline(echo, line);
      j["config"] = line.substr(2);
      j["columns"] = columns;
      j["rows"] = rows;
      if (!summary_lines.empty()) j["summary"] = summary_lines;
      return j.dump() + "\n";
    }
    std::ostringstream os;
    os << config_echo(command, cfg, with_trials, with_batches);
    for (std::size_t i = 0; i < columns.size(); ++i) {
      os << (i ? "," : "") << columns[i];
    }
    os << "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
      os << "\n";
    }
    for (const auto& line : summary_lines) os << "# " << line << "\n";
    return os.str();
  }
};

std::vector<std::string> split_csv_row(const std::string& row) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(row);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!row.empty() && row.back() == ',') out.push_back("");
  return out;
}

Params params_of(const CliConfig& cfg, std::uint64_t t_factor_override = 0) {
  return derive_params(cfg.n, cfg.k, cfg.c, cfg.c1, cfg.c2,
                       t_factor_override ? t_factor_override : cfg.t_factor);
}

int cmd_gen_instance(const CliConfig& cfg) {
  const Params params = params_of(cfg);
  const InstanceKind kind =
      cfg.kind == "yes" ? InstanceKind::Yes : InstanceKind::No;
  const DisjInstance inst = gen_instance(params, kind, cfg.seed);
  if (cfg.format == "json") {
    emit(cfg, instance_to_json(inst));  // the canonical instance format
  } else {
    emit(cfg, config_echo("gen-instance", cfg, false, false) + instance_to_csv(inst));
  }
  return kExitOk;
}

int cmd_build_stream(const CliConfig& cfg) {
  const Params params = params_of(cfg);
  DisjInstance inst;
  if (!cfg.instance_path.empty()) {
    std::ifstream in(cfg.instance_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + cfg.instance_path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    inst = instance_from_json(buffer.str());
  } else {
    const InstanceKind kind =
        cfg.kind == "yes" ? InstanceKind::Yes : InstanceKind::No;
    inst = gen_instance(params, kind, cfg.seed);
  }

  auto drawn = draw_public_randomness(params, cfg.seed);
  if (std::holds_alternative<Abort>(drawn)) {
    std::cout << "aborted," << abort_reason_name(std::get<Abort>(drawn).reason)
              << "\n";
    return kExitOk;
  }
  const StreamAssembly assembly =
      assemble_stream(inst, std::get<PublicRandomness>(drawn), params, cfg.seed);
  const std::string path = cfg.out.empty() ? "stream.bin" : cfg.out;
  write_assembly_binary(path, assembly, params.k);
  std::cout << "written," << path << ",n=" << assembly.n()
            << ",messages=" << count_messages(assembly) << "\n";
  return kExitOk;
}

int cmd_lemma1(const CliConfig& cfg, Report* collect) {
  const Lemma1Report rep = verify_lemma1(cfg.n, cfg.k, cfg.c1, cfg.trials, cfg.seed);
  Report report{"lemma1", cfg, true, false,
                split_csv_row(Lemma1Report::csv_header()),
                {split_csv_row(rep.csv_row())},
                {}};
  if (collect) {
    collect->columns = report.columns;
    collect->rows.push_back(report.rows[0]);
    return kExitOk;
  }
  emit(cfg, report.render());
  return kExitOk;
}

int cmd_lemma2(const CliConfig& cfg, Report* collect) {
  const GapReport rep = verify_lemma2(cfg.n, cfg.k, cfg.c2, cfg.trials, cfg.seed);
  Report report{"lemma2", cfg, true, false,
                split_csv_row(GapReport::csv_header()),
                {split_csv_row(rep.csv_row())},
                {}};
  if (collect) {
    collect->columns = report.columns;
    collect->rows.push_back(report.rows[0]);
    return kExitOk;
  }
  emit(cfg, report.render());
  return kExitOk;
}

struct ProtocolSummary {
  std::uint64_t runs = 0, aborted = 0, correct = 0;
  double mean_messages = 0, mean_total_bits = 0, reference_budget = 0;
  double accuracy() const {
    return runs == aborted
               ? std::nan("")
               : static_cast<double>(correct) / static_cast<double>(runs - aborted);
  }
  double abort_rate() const {
    return runs == 0 ? 0.0 : static_cast<double>(aborted) / static_cast<double>(runs);
  }
};

ProtocolSummary run_protocol_trials(const CliConfig& cfg, const Params& params,
                                    std::vector<ProtocolOutcome>* outcomes) {
  const ProtocolOptions options{
      cfg.estimator == "ams" ? EstimatorKind::Ams : EstimatorKind::Exact,
      cfg.samples, false};
  const std::uint64_t total = 2 * cfg.trials;
  std::vector<ProtocolOutcome> results(total);
  parallel_for(total, [&](std::uint64_t i) {
    const bool yes = i >= cfg.trials;
    const std::uint64_t trial = yes ? i - cfg.trials : i;
    const std::uint64_t run_seed =
        derive_seed(cfg.seed, yes ? "trial.yes" : "trial.no", trial);
    const DisjInstance inst = gen_instance(
        params, yes ? InstanceKind::Yes : InstanceKind::No, run_seed);
    results[i] = run_protocol(inst, params, options, run_seed);
  });

  ProtocolSummary summary;
  summary.runs = total;
  double msg_sum = 0, bits_sum = 0;
  for (const auto& outcome : results) {
    if (outcome.aborted) {
      ++summary.aborted;
    } else {
      if (outcome.correct()) ++summary.correct;
      msg_sum += static_cast<double>(outcome.messages);
      bits_sum += static_cast<double>(outcome.total_bits());
    }
    summary.reference_budget = outcome.reference_budget;
  }
  const double decided = static_cast<double>(total - summary.aborted);
  summary.mean_messages = decided > 0 ? msg_sum / decided : 0;
  summary.mean_total_bits = decided > 0 ? bits_sum / decided : 0;
  if (outcomes) *outcomes = std::move(results);
  return summary;
}

int cmd_protocol(const CliConfig& cfg, Report* collect) {
  const Params params = params_of(cfg);
  std::vector<ProtocolOutcome> outcomes;
  const ProtocolSummary summary = run_protocol_trials(cfg, params, &outcomes);

  if (collect) {
    collect->columns = {"n",      "k",          "c",         "c1",
                        "c2",     "t_factor",   "trials",    "estimator",
                        "samples", "accuracy",  "abort_rate", "mean_messages",
                        "mean_total_bits", "reference_budget"};
    collect->rows.push_back(
        {std::to_string(cfg.n), std::to_string(cfg.k), cfg.c.str(), cfg.c1.str(),
         cfg.c2.str(), std::to_string(cfg.t_factor), std::to_string(cfg.trials),
         cfg.estimator, std::to_string(cfg.samples), fmt_double(summary.accuracy()),
         fmt_double(summary.abort_rate()), fmt_double(summary.mean_messages),
         fmt_double(summary.mean_total_bits), fmt_double(summary.reference_budget)});
    return kExitOk;
  }

  Report report{"protocol", cfg, true, false,
                split_csv_row(ProtocolOutcome::csv_header()), {}, {}};
  for (const auto& outcome : outcomes) {
    report.rows.push_back(split_csv_row(outcome.csv_row()));
  }
  std::ostringstream sum;
  sum << "summary accuracy=" << fmt_double(summary.accuracy())
      << " abort_rate=" << fmt_double(summary.abort_rate())
      << " mean_messages=" << fmt_double(summary.mean_messages)
      << " mean_total_bits=" << fmt_double(summary.mean_total_bits)
      << " reference_budget=" << fmt_double(summary.reference_budget);
  report.summary_lines.push_back(sum.str());
  emit(cfg, report.render());

  if (!cfg.export_stream.empty()) {
    // Export the first non-aborted run's stream, re-derived from its seed.
    for (const auto& outcome : outcomes) {
      if (outcome.aborted) continue;
      const DisjInstance inst = gen_instance(params, outcome.kind, outcome.seed);
      auto drawn = draw_public_randomness(params, outcome.seed);
      const StreamAssembly assembly = assemble_stream(
          inst, std::get<PublicRandomness>(drawn), params, outcome.seed);
      write_assembly_binary(cfg.export_stream, assembly, params.k);
      break;
    }
  }
  return kExitOk;
}

int cmd_diagnose(const CliConfig& cfg, Report* collect) {
  const Params params = params_of(cfg);
  const UniformityReport rep = order_uniformity_test(params, cfg.batches, cfg.seed);
  Report report{"diagnose", cfg, false, true,
                split_csv_row(UniformityReport::csv_header()),
                {split_csv_row(rep.csv_row())},
                {}};
  if (collect) {
    collect->columns = report.columns;
    collect->rows.push_back(report.rows[0]);
    return kExitOk;
  }
  emit(cfg, report.render());
  return kExitOk;
}

struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

void apply_axis(CliConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "n") cfg.n = parse_scale(value);
  else if (key == "k") cfg.k = static_cast<int>(parse_scale(value));
  else if (key == "c") cfg.c = Ratio::parse(value);
  else if (key == "c1") cfg.c1 = Ratio::parse(value);
  else if (key == "c2") cfg.c2 = Ratio::parse(value);
  else if (key == "t-factor" || key == "t_factor") cfg.t_factor = parse_scale(value);
  else if (key == "seed") cfg.seed = parse_scale(value);
  else if (key == "trials") cfg.trials = parse_scale(value);
  else if (key == "batches") cfg.batches = parse_scale(value);
  else if (key == "samples") cfg.samples = static_cast<std::uint32_t>(parse_scale(value));
  else throw InvalidScaleError("unknown sweep key '" + key + "'");
}

int cmd_sweep(const CliConfig& base, const std::string& target,
              const std::vector<std::string>& vary_specs) {
  if (vary_specs.empty()) throw InvalidScaleError("sweep requires at least one --vary");
  std::vector<SweepAxis> axes;
  for (const auto& spec : vary_specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
      throw InvalidScaleError("--vary expects key=v1,v2,... got '" + spec + "'");
    }
    SweepAxis axis;
    axis.key = spec.substr(0, eq);
    std::istringstream values(spec.substr(eq + 1));
    std::string v;
    while (std::getline(values, v, ',')) axis.values.push_back(v);
    if (axis.values.empty()) throw InvalidScaleError("--vary with no values");
    axes.push_back(std::move(axis));
  }

  Report report;
  report.command = "sweep-" + target;
  report.cfg = base;
  report.with_trials = true;
  report.with_batches = target == "diagnose";

  std::vector<std::size_t> at(axes.size(), 0);
  bool done = false;
  while (!done) {
    CliConfig cfg = base;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      apply_axis(cfg, axes[a].key, axes[a].values[at[a]]);
    }
    Report point;
    point.cfg = cfg;
    if (target == "lemma1") cmd_lemma1(cfg, &point);
    else if (target == "lemma2") cmd_lemma2(cfg, &point);
    else if (target == "protocol") cmd_protocol(cfg, &point);
    else if (target == "diagnose") cmd_diagnose(cfg, &point);
    else throw InvalidScaleError("sweep target must be lemma1|lemma2|protocol|diagnose");

    std::vector<std::string> row;
    if (target == "lemma1" || target == "lemma2" || target == "diagnose") {
      // Prefix the grid coordinates that are not already in the row schema.
      if (report.columns.empty()) {
        report.columns = {"c", "t_factor", "seed"};
        report.columns.insert(report.columns.end(), point.columns.begin(),
                              point.columns.end());
      }
      row = {cfg.c.str(), std::to_string(cfg.t_factor), std::to_string(cfg.seed)};
      row.insert(row.end(), point.rows[0].begin(), point.rows[0].end());
    } else {
      if (report.columns.empty()) report.columns = point.columns;
      row = point.rows[0];
    }
    report.rows.push_back(std::move(row));

    for (std::size_t a = axes.size(); a-- > 0;) {
      if (++at[a] < axes[a].values.size()) break;
      at[a] = 0;
      if (a == 0) done = true;
    }
  }

  emit(base, report.render());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random-order stream moment laboratory"};
  app.require_subcommand(1);

  CliConfig cfg;
  std::string n_text = "1e6", target;
  std::vector<std::string> vary_specs;
  std::string c_text = "1/2", c1_text = "1/1000", c2_text = "1/200";

  auto add_common = [&](CLI::App* sub, bool trials, bool batches) {
    sub->add_option("--n", n_text, "stream length (accepts 1e6 notation)");
    sub->add_option("--k", cfg.k, "moment order, integer >= 2");
    sub->add_option("--c", c_text, "disjointness density constant (ratio or decimal)");
    sub->add_option("--c1", c1_text, "interval width constant");
    sub->add_option("--c2", c2_text, "block width constant");
    sub->add_option("--t-factor", cfg.t_factor, "player-count factor (100 = protocol mode)");
    sub->add_option("--seed", cfg.seed, "root seed; all randomness derives from it");
    if (trials) sub->add_option("--trials", cfg.trials, "Monte-Carlo trials");
    if (batches) sub->add_option("--batches", cfg.batches, "diagnostic batches (>= 30)");
    sub->add_option("--out", cfg.out, "output path (default stdout)");
    sub->add_option("--format", cfg.format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  auto* gen = app.add_subcommand("gen-instance", "emit a canonical disjointness instance");
  add_common(gen, false, false);
  gen->add_option("--kind", cfg.kind, "yes | no")->check(CLI::IsMember({"yes", "no"}));

  auto* build = app.add_subcommand("build-stream", "assemble one stream and export it");
  add_common(build, false, false);
  build->add_option("--kind", cfg.kind, "yes | no")->check(CLI::IsMember({"yes", "no"}));
  build->add_option("--instance", cfg.instance_path, "instance JSON to embed");

  auto* lemma1 = app.add_subcommand("lemma1", "interval intersection Monte-Carlo report");
  add_common(lemma1, true, false);

  auto* lemma2 = app.add_subcommand("lemma2", "birthday spacing Monte-Carlo report");
  add_common(lemma2, true, false);

  auto* protocol = app.add_subcommand("protocol", "end-to-end reduction runs");
  add_common(protocol, true, false);
  protocol->add_option("--estimator", cfg.estimator, "exact | ams")
      ->check(CLI::IsMember({"exact", "ams"}));
  protocol->add_option("--samples", cfg.samples, "AMS sample count");
  protocol->add_option("--export-stream", cfg.export_stream,
                       "write the first non-aborted stream here");

  auto* diagnose = app.add_subcommand("diagnose", "stream-order uniformity tests");
  add_common(diagnose, false, true);

  auto* sweep = app.add_subcommand("sweep", "grid-run another command");
  sweep->add_option("target", target, "lemma1 | lemma2 | protocol | diagnose")
      ->required();
  add_common(sweep, true, true);
  sweep->add_option("--vary", vary_specs, "key=v1,v2,... (repeatable, cartesian)");
  sweep->add_option("--estimator", cfg.estimator, "exact | ams")
      ->check(CLI::IsMember({"exact", "ams"}));
  sweep->add_option("--samples", cfg.samples, "AMS sample count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;  // help is not an error
  }

  try {
    cfg.n = parse_scale(n_text);
    cfg.c = Ratio::parse(c_text);
    cfg.c1 = Ratio::parse(c1_text);
    cfg.c2 = Ratio::parse(c2_text);
    if (cfg.format.empty()) {
      cfg.format = gen->parsed() ? "json" : "csv";  // instance files are canonical JSON
    }

    if (gen->parsed()) return cmd_gen_instance(cfg);
    if (build->parsed()) return cmd_build_stream(cfg);
    if (lemma1->parsed()) return cmd_lemma1(cfg, nullptr);
    if (lemma2->parsed()) return cmd_lemma2(cfg, nullptr);
    if (protocol->parsed()) return cmd_protocol(cfg, nullptr);
    if (diagnose->parsed()) {
      if (cfg.batches < 30) {
        std::cerr << "error: --batches must be >= 30\n";
        return kExitUsage;
      }
      return cmd_diagnose(cfg, nullptr);
    }
    if (sweep->parsed()) return cmd_sweep(cfg, target, vary_specs);
    return kExitUsage;
  } catch (const InvalidScaleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InfeasiblePromiseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NotMemberError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::logic_error& e) {
    std::cerr << "internal invariant violation: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}
