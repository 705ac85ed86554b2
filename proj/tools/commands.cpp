// Copyright 2026 The hydrotwin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hydrotwin/dataset.hpp"
#include "hydrotwin/errors.hpp"
#include "hydrotwin/fdd.hpp"
#include "hydrotwin/keyvalue.hpp"
#include "hydrotwin/scenario.hpp"
#include "hydrotwin/training.hpp"

namespace hydrotwin::cli {
namespace fs = std::filesystem;
namespace {

constexpr const char* kManifestName = "manifest.txt";
constexpr const char* kTwinName = "twin.cfg";

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Everything needed to regenerate an artifact: the exact argument list plus
// the resolved inputs for a human reader.
struct RunManifest {
  std::string command;
  std::vector<std::string> args;
  std::vector<std::pair<std::string, std::string>> paths;
  std::uint64_t seed = 0;

  std::string to_text() const {
    std::string out = "# hydrotwin run manifest\n";
    out += "command = " + command + "\n";
    out += "seed = " + std::to_string(seed) + "\n";
    out += "timestamp = " + utc_timestamp() + "\n";
    for (const auto& [k, v] : paths) out += "path." + k + " = " + v + "\n";
    for (const auto& a : args) out += "arg = " + a + "\n";
    return out;
  }
};

void write_manifest(const RunManifest& m, const fs::path& path) {
  for (const auto& a : m.args) {
    if (a.find('#') != std::string::npos || a.find('\n') != std::string::npos) {
      throw InvalidInput("argument cannot be recorded in a manifest: " + a);
    }
  }
  write_text_file(path, m.to_text());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

struct Environment {
  ComponentVector nominal;
  LoopConfig cfg;
};

// Loop constants and nominal parameters from one optional file.
Environment load_environment(const std::string& config) {
  if (config.empty()) return {};
  const auto file = KeyValueFile::read(config);
  return {ComponentVector::from_keyvalue(file), LoopConfig::from_keyvalue(file)};
}

TwinState load_twin(const fs::path& models_dir, const std::string& twin_path) {
  fs::path p = twin_path.empty() ? models_dir / kTwinName : fs::path(twin_path);
  if (twin_path.empty() && !fs::exists(p)) return {};
  auto twin = TwinState::from_keyvalue(KeyValueFile::read(p));
  twin.validate();
  return twin;
}

struct SimulateArgs {
  double u1 = 0.0;
  double u2 = 0.0;
  std::vector<std::string> theta;
  std::string config;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const auto env = load_environment(a.config);
  auto theta = env.nominal;
  for (const auto& kv : a.theta) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InvalidInput("--theta expects name=value: " + kv);
    const auto p = parameter_from_name(kv.substr(0, eq));
    if (!p) throw InvalidInput("unknown parameter: " + kv.substr(0, eq));
    theta[*p] = parse_number(kv.substr(eq + 1), 0);
  }
  theta.validate();
  const ControlVector u{a.u1, a.u2};
  u.validate();
  const auto y = simulate(u, theta, env.cfg);
  out << "p1=" << fixed6(y.p1) << "\np2=" << fixed6(y.p2) << "\np3=" << fixed6(y.p3)
      << "\np4=" << fixed6(y.p4) << "\nfl=" << fixed6(y.fl) << "\n";
  return kExitOk;
}

struct GenArgs {
  std::string plan;
  std::string out;
  std::string config;
  std::optional<std::uint64_t> seed;
};

int cmd_gen(const GenArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  auto plan = a.plan.empty() ? SamplingPlan::desk_default()
                             : SamplingPlan::from_keyvalue(KeyValueFile::read(a.plan));
  if (a.seed) plan.seed = *a.seed;
  plan.validate();
  const auto env = load_environment(a.config);
  const auto result = generate(plan, env.nominal, env.cfg);
  save_records(result.records, a.out);

  RunManifest m{"gen", args, {{"dataset", a.out}}, plan.seed};
  if (!a.plan.empty()) m.paths.push_back({"plan", a.plan});
  if (!a.config.empty()) m.paths.push_back({"config", a.config});
  write_manifest(m, a.out + ".manifest");
  out << "records = " << result.records.size() << "\n"
      << "dropped = " << result.dropped << "\n"
      << "dataset = " << a.out << "\n";
  return kExitOk;
}

struct TrainArgs {
  std::string data;
  std::string out_dir;
  std::string config;
  double train_fraction = 0.8;
  std::uint64_t seed = 1;
  TrainingOptions options;
};

int cmd_train(const TrainArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  const auto env = load_environment(a.config);
  const auto records = load_records(a.data);
  const auto parts = split(records, a.train_fraction, a.seed);
  TrainingSummary summary;
  const auto models = train_models(parts.train, env.nominal, env.cfg, a.options, &summary);

  const fs::path dir(a.out_dir);
  ensure_dir(dir);
  save_models(models, dir);
  save_records(parts.train, dir / "train.csv");
  save_records(parts.test, dir / "holdout.csv");
  TwinState twin;
  twin.theta_model = env.nominal;
  twin.theta_nominal = env.nominal;
  twin.cfg = env.cfg;
  write_text_file(dir / kTwinName, twin.to_text());

  std::string text = "train_rows = " + std::to_string(parts.train.size()) + "\n" +
                     "holdout_rows = " + std::to_string(parts.test.size()) + "\n" +
                     "tree_depth = " + std::to_string(models.classifier.depth()) + "\n" +
                     "tree_leaves = " + std::to_string(models.classifier.leaf_count()) + "\n";
  for (int c = 1; c <= kNumFaultClasses; ++c) {
    const auto k = static_cast<std::size_t>(c - 1);
    text += "svr_" + std::to_string(c) + ".rows = " + std::to_string(summary.estimator_rows[k]) +
            "\n" + "svr_" + std::to_string(c) +
            ".excluded = " + std::to_string(summary.excluded_rows[k]) + "\n" + "svr_" +
            std::to_string(c) + ".converged = " + (summary.estimator_converged[k] ? "1" : "0") +
            "\n";
  }
  write_text_file(dir / "training.txt", text);

  RunManifest m{"train", args, {{"dataset", a.data}, {"models", a.out_dir}}, a.seed};
  if (!a.config.empty()) m.paths.push_back({"config", a.config});
  write_manifest(m, dir / kManifestName);
  out << text;
  return kExitOk;
}

struct EvalArgs {
  std::string data;
  std::string models;
  std::string twin;
  std::string out_dir;
};

int cmd_eval(const EvalArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  const auto twin = load_twin(a.models, a.twin);
  const auto models = load_models(a.models);
  const auto records = load_records(a.data);
  const auto loc = evaluate_localization(models.classifier, records, twin.theta_nominal, twin.cfg);
  const auto est = evaluate_estimation(models.estimators, models.classifier, records,
                                       twin.theta_nominal, twin.cfg);

  char acc[32];
  std::snprintf(acc, sizeof(acc), "%.2f", 100.0 * loc.confusion.overall_accuracy());
  out << "confusion matrix (rows: classification, columns: truth)\n"
      << loc.confusion.format_counts() << "\naccuracy matrix (percent of each truth column)\n"
      << loc.confusion.format_percent() << "\noverall accuracy = " << acc << "%\n"
      << "\nestimation relative error (correctly localized records)\n"
      << est.summary_csv();

  if (!a.out_dir.empty()) {
    const fs::path dir(a.out_dir);
    ensure_dir(dir);
    write_text_file(dir / "confusion.csv", loc.confusion.counts_csv());
    write_text_file(dir / "accuracy.csv", loc.confusion.percent_csv());
    write_text_file(dir / "estimation.csv", est.to_csv());
    write_text_file(dir / "estimation_summary.csv", est.summary_csv());
    RunManifest m{"eval", args, {{"dataset", a.data}, {"models", a.models}}, 0};
    write_manifest(m, dir / kManifestName);
  }
  return kExitOk;
}

struct ScenarioArgs {
  std::string spec;
  std::string models;
  std::string twin;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

int cmd_scenario(const ScenarioArgs& a, const std::vector<std::string>& args,
                 std::ostream& out) {
  auto twin = load_twin(a.models, a.twin);
  const auto models = load_models(a.models);
  auto spec = ScenarioSpec::from_keyvalue(KeyValueFile::read(a.spec), twin.theta_nominal);
  if (a.seed) spec.seed = *a.seed;
  const auto result = run_scenario(spec, twin, models);

  const fs::path dir(a.out_dir);
  ensure_dir(dir);
  write_text_file(dir / "trace.csv", result.trace_csv());
  write_text_file(dir / "metrics.txt", result.metrics.to_text());
  std::string reports;
  for (const auto& s : result.steps) {
    if (!s.report.triggered) continue;
    reports += "[step " + std::to_string(s.step) + "]\n" + s.report.to_text();
  }
  write_text_file(dir / "reports.txt", reports);
  RunManifest m{"scenario", args, {{"spec", a.spec}, {"models", a.models}}, spec.seed};
  write_manifest(m, dir / kManifestName);
  out << result.metrics.to_text();
  return kExitOk;
}

struct CampaignArgs {
  std::string models;
  std::string twin;
  std::string out;
  CampaignSpec spec;
};

int cmd_campaign(const CampaignArgs& a, const std::vector<std::string>& args,
                 std::ostream& out) {
  const auto twin = load_twin(a.models, a.twin);
  const auto models = load_models(a.models);
  const auto result = run_campaign(a.spec, twin, models);
  if (!a.out.empty()) {
    write_text_file(a.out, result.to_csv());
    RunManifest m{"campaign", args, {{"models", a.models}, {"events", a.out}}, a.spec.seed};
    write_manifest(m, a.out + ".manifest");
  }
  out << result.metrics.to_text();
  return kExitOk;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cmd_rerun(const std::string& manifest, std::ostream& out, std::ostream& err) {
  const auto file = KeyValueFile::read(manifest);
  std::vector<std::string> args;
  for (const auto* e : file.find_all("arg")) args.push_back(e->value);
  if (args.empty()) throw ParseError("manifest records no arguments", 0);
  if (args.front() == "rerun") throw InvalidInput("manifest records a rerun");
  return dispatch(args, out, err);
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Digital twin of a closed hydraulic loop: simulation, training and fault diagnosis"};
  app.name("hydrotwin");
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Print the steady state at one operating point");
  s->add_option("--u1", sim.u1, "Pump speed, %")->required()->check(CLI::Range(0.0, 100.0));
  s->add_option("--u2", sim.u2, "Valve opening, %")->required()->check(CLI::Range(0.0, 100.0));
  s->add_option("--theta", sim.theta, "Parameter override name=value (repeatable)");
  s->add_option("--config", sim.config, "Loop config file")->check(CLI::ExistingFile);

  GenArgs gen;
  std::uint64_t gen_seed = 0;
  auto* g = app.add_subcommand("gen", "Generate a labeled fault database");
  g->add_option("--plan", gen.plan, "Sampling plan file (default: desk plan)")
      ->check(CLI::ExistingFile);
  g->add_option("--out", gen.out, "Output CSV")->required();
  g->add_option("--config", gen.config, "Loop config file")->check(CLI::ExistingFile);
  auto* gen_seed_opt = g->add_option("--seed", gen_seed, "Seed recorded with the plan");

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Split a database and fit the classifier and estimators");
  t->add_option("--data", train.data, "Database CSV")->required()->check(CLI::ExistingFile);
  t->add_option("--out-dir", train.out_dir, "Model directory")->required();
  t->add_option("--config", train.config, "Loop config file")->check(CLI::ExistingFile);
  t->add_option("--train-fraction", train.train_fraction, "Training share")
      ->check(CLI::Range(0.0, 1.0));
  t->add_option("--seed", train.seed, "Split seed");
  t->add_option("--max-depth", train.options.tree.max_depth)->check(CLI::PositiveNumber);
  t->add_option("--min-leaf", train.options.tree.min_samples_leaf)->check(CLI::PositiveNumber);
  t->add_option("--svr-c", train.options.svr.c)->check(CLI::PositiveNumber);
  t->add_option("--svr-epsilon", train.options.svr.epsilon)->check(CLI::NonNegativeNumber);
  t->add_option("--svr-gamma", train.options.svr.gamma)->check(CLI::PositiveNumber);

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Localization and estimation reports on held-out records");
  e->add_option("--data", ev.data, "Held-out CSV")->required()->check(CLI::ExistingFile);
  e->add_option("--models", ev.models, "Model directory")->required()->check(CLI::ExistingDirectory);
  e->add_option("--twin", ev.twin, "Twin config (default: <models>/twin.cfg)");
  e->add_option("--out-dir", ev.out_dir, "Write CSV tables here");

  ScenarioArgs sc;
  std::uint64_t sc_seed = 0;
  auto* c = app.add_subcommand("scenario", "Run a fault-injection timeline");
  c->add_option("--spec", sc.spec, "Scenario file")->required()->check(CLI::ExistingFile);
  c->add_option("--models", sc.models, "Model directory")->required()->check(CLI::ExistingDirectory);
  c->add_option("--twin", sc.twin, "Twin config (default: <models>/twin.cfg)");
  c->add_option("--out-dir", sc.out_dir, "Trace and metrics directory")->required();
  auto* sc_seed_opt = c->add_option("--seed", sc_seed, "Noise seed (overrides the file)");

  CampaignArgs cp;
  auto* p = app.add_subcommand("campaign", "Independent single-fault injections");
  p->add_option("--models", cp.models, "Model directory")->required()->check(CLI::ExistingDirectory);
  p->add_option("--twin", cp.twin, "Twin config (default: <models>/twin.cfg)");
  p->add_option("--out", cp.out, "Per-event CSV");
  p->add_option("--events", cp.spec.events)->check(CLI::PositiveNumber);
  p->add_option("--seed", cp.spec.seed);
  p->add_option("--noise", cp.spec.noise_percent, "Noise, % of channel scale")
      ->check(CLI::NonNegativeNumber);
  p->add_option("--min-deviation", cp.spec.min_deviation);
  p->add_option("--max-deviation", cp.spec.max_deviation);

  std::string manifest;
  auto* r = app.add_subcommand("rerun", "Repeat the command recorded in a manifest");
  r->add_option("manifest", manifest)->required()->check(CLI::ExistingFile);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitParse;
  }

  if (s->parsed()) return cmd_simulate(sim, out);
  if (g->parsed()) {
    if (gen_seed_opt->count() > 0) gen.seed = gen_seed;
    return cmd_gen(gen, args, out);
  }
  if (t->parsed()) return cmd_train(train, args, out);
  if (e->parsed()) return cmd_eval(ev, args, out);
  if (c->parsed()) {
    if (sc_seed_opt->count() > 0) sc.seed = sc_seed;
    return cmd_scenario(sc, args, out);
  }
  if (p->parsed()) return cmd_campaign(cp, args, out);
  return cmd_rerun(manifest, out, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const ParseError& ex) {
    err << "parse error: " << ex.what() << "\n";
    return kExitParse;
  } catch (const InvalidInput& ex) {
    err << "invalid input: " << ex.what() << "\n";
    return kExitParse;
  } catch (const EmptyPlan& ex) {
    err << "invalid input: " << ex.what() << "\n";
    return kExitParse;
  } catch (const FormatError& ex) {
    err << "bad model file: " << ex.what() << "\n";
    return kExitParse;
  } catch (const IoError& ex) {
    err << "i/o error: " << ex.what() << "\n";
    return kExitIo;
  } catch (const Error& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitRuntime;
  } catch (const fs::filesystem_error& ex) {
    err << "i/o error: " << ex.what() << "\n";
    return kExitIo;
  }
}

}  // namespace hydrotwin::cli
