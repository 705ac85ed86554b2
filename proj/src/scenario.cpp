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

#include "hydrotwin/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string_view>
#include <utility>

#include "hydrotwin/errors.hpp"
#include "hydrotwin/features.hpp"
#include "hydrotwin/training.hpp"

namespace hydrotwin {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string_view> split_commas(std::string_view text) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(text.substr(0, comma));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

int parse_step(std::string_view text, std::size_t line) {
  const double v = parse_number(trim(text), line);
  if (v < 0.0 || v != std::floor(v) || v > 1e9) {
    throw ParseError("step must be a non-negative integer: " + std::string(text), line);
  }
  return static_cast<int>(v);
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string stats_row(const std::string& label, const ErrorStats& s) {
  return label + "," + std::to_string(s.count) + "," + format_exact(s.median) + "," +
         format_exact(s.p90) + "," + format_exact(s.max) + "\n";
}

ErrorStats errors_where(const std::vector<EstimationSample>& samples, auto pred) {
  std::vector<double> v;
  for (const auto& s : samples) {
    if (pred(s)) v.push_back(s.relative_error);
  }
  return summarize_errors(v);
}

ProcessVector model_output(const ControlVector& u, const TwinState& twin) {
  try {
    return simulate(u, twin.theta_model, twin.cfg);
  } catch (const NoConvergence&) {
    return ProcessVector::from_array({kNaN, kNaN, kNaN, kNaN, kNaN});
  }
}

int first_class(const FddReport& report) {
  return report.trace.empty() ? 0 : report.trace.front().fault_class;
}

}  // namespace

PhysicalTwin::PhysicalTwin(ComponentVector theta, LoopConfig cfg, double noise_percent,
                           std::uint64_t seed)
    : theta_(theta), cfg_(cfg), noise_percent_(noise_percent), rng_(seed) {
  if (!(noise_percent >= 0.0) || !std::isfinite(noise_percent)) {
    throw InvalidInput("noise_percent must be finite and >= 0");
  }
  theta_.validate();
  cfg_.validate();
}

ProcessVector step_physical_twin(PhysicalTwin& twin, const ControlVector& u) {
  auto y = simulate(u, twin.theta_, twin.cfg_).to_array();
  if (twin.noise_percent_ > 0.0) {
    for (std::size_t k = 0; k < y.size(); ++k) {
      y[k] += twin.rng_.normal() * twin.noise_percent_ / 100.0 * kNoiseChannelScale[k];
    }
  }
  return ProcessVector::from_array(y);
}

void ScenarioSpec::validate() const {
  if (steps <= 0) throw InvalidInput("steps must be positive");
  if (!(noise_percent >= 0.0) || !std::isfinite(noise_percent)) {
    throw InvalidInput("noise_percent must be finite and >= 0");
  }
  if (event_timeout < 1) throw InvalidInput("event_timeout must be at least 1");
  if (controls.empty() || controls.front().step != 0) {
    throw InvalidInput("a control setpoint at step 0 is required");
  }
  for (std::size_t i = 0; i < controls.size(); ++i) {
    controls[i].u.validate();
    if (i > 0 && controls[i].step <= controls[i - 1].step) {
      throw InvalidInput("control steps must be strictly increasing");
    }
  }
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    if (e.step < 0 || e.step >= steps) {
      throw InvalidInput("event step out of range: " + std::to_string(e.step));
    }
    if (i > 0 && e.step <= events[i - 1].step) {
      throw InvalidInput("event steps must be strictly increasing");
    }
    if (e.kind == EventKind::kFault && (!(e.new_value > 0.0) || !std::isfinite(e.new_value))) {
      throw InvalidInput("fault value must be finite and positive");
    }
  }
}

ScenarioSpec ScenarioSpec::from_keyvalue(const KeyValueFile& file,
                                         const ComponentVector& nominal) {
  ScenarioSpec spec;
  if (const auto v = file.number("steps")) {
    if (*v != std::floor(*v) || *v < 1 || *v > 1e9) {
      throw ParseError("steps must be a positive integer", file.find("steps")->line);
    }
    spec.steps = static_cast<int>(*v);
  }
  if (const auto v = file.number("noise_percent")) spec.noise_percent = *v;
  if (const auto* e = file.find("seed")) {
    const double v = parse_number(e->value, e->line);
    if (v < 0 || v != std::floor(v) || v > 9.007199254740992e15) {
      throw ParseError("seed must be a non-negative integer", e->line);
    }
    spec.seed = static_cast<std::uint64_t>(v);
  }
  if (const auto* e = file.find("event_timeout")) spec.event_timeout = parse_step(e->value, e->line);

  for (const auto* e : file.find_all("control")) {
    const auto parts = split_commas(e->value);
    if (parts.size() != 3) throw ParseError("control expects step,u1,u2", e->line);
    spec.controls.push_back({parse_step(parts[0], e->line),
                             {parse_number(trim(parts[1]), e->line),
                              parse_number(trim(parts[2]), e->line)}});
  }
  // Faults and resets share one timeline; merge them by step, file order on ties.
  for (const auto& entry : file.entries()) {
    if (entry.key == "event") {
      const auto parts = split_commas(entry.value);
      if (parts.size() != 3) throw ParseError("event expects step,index,value", entry.line);
      FaultEvent ev;
      ev.step = parse_step(parts[0], entry.line);
      const double index = parse_number(trim(parts[1]), entry.line);
      if (index != std::floor(index) || index < 1 || index > 6) {
        throw ParseError("event parameter index must be 1..6", entry.line);
      }
      ev.parameter = parameter_from_index(static_cast<int>(index));
      auto value = trim(parts[2]);
      if (!value.empty() && (value.front() == 'x' || value.front() == 'X')) {
        value.remove_prefix(1);
        ev.new_value = nominal[ev.parameter] * parse_number(value, entry.line);
      } else {
        ev.new_value = parse_number(value, entry.line);
      }
      spec.events.push_back(ev);
    } else if (entry.key == "reset") {
      FaultEvent ev;
      ev.kind = EventKind::kReset;
      ev.step = parse_step(entry.value, entry.line);
      spec.events.push_back(ev);
    }
  }
  std::stable_sort(spec.events.begin(), spec.events.end(),
                   [](const FaultEvent& a, const FaultEvent& b) { return a.step < b.step; });
  spec.validate();
  return spec;
}

std::string ScenarioSpec::to_text() const {
  std::string out;
  out += "steps = " + std::to_string(steps) + "\n";
  out += "noise_percent = " + format_exact(noise_percent) + "\n";
  out += "seed = " + std::to_string(seed) + "\n";
  out += "event_timeout = " + std::to_string(event_timeout) + "\n";
  for (const auto& c : controls) {
    out += "control = " + std::to_string(c.step) + "," + format_exact(c.u.u1) + "," +
           format_exact(c.u.u2) + "\n";
  }
  for (const auto& e : events) {
    if (e.kind == EventKind::kReset) {
      out += "reset = " + std::to_string(e.step) + "\n";
    } else {
      out += "event = " + std::to_string(e.step) + "," + std::to_string(to_index(e.parameter)) +
             "," + format_exact(e.new_value) + "\n";
    }
  }
  return out;
}

ScenarioSpec random_control_timeline(int steps, double noise_percent, std::uint64_t seed,
                                     double u1_min, double u1_max, double u2_min,
                                     double u2_max) {
  ScenarioSpec spec;
  spec.steps = steps;
  spec.noise_percent = noise_percent;
  spec.seed = seed;
  // Setpoints draw from their own stream so the noise stream matches a
  // fixed-control run with the same seed.
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (int t = 0; t < steps; ++t) {
    const double u1 = rng.uniform(u1_min, u1_max);
    const double u2 = rng.uniform(u2_min, u2_max);
    spec.controls.push_back({t, {u1, u2}});
  }
  spec.validate();
  return spec;
}

double CampaignMetrics::convergence_rate() const {
  return events == 0 ? 0.0 : static_cast<double>(converged) / static_cast<double>(events);
}

ErrorStats CampaignMetrics::class_errors(int fault_class) const {
  return errors_where(estimation,
                      [&](const EstimationSample& s) { return s.fault_class == fault_class; });
}

std::string CampaignMetrics::to_text() const {
  std::string out;
  out += "# confusion (rows: classification, columns: truth)\n";
  out += confusion.counts_csv();
  out += "# accuracy percent (column-normalized)\n";
  out += confusion.percent_csv();
  out += "# overall_accuracy = " + fixed(100.0 * confusion.overall_accuracy(), 2) + "\n";
  out += "# relative error per class\nclass,count,median,p90,max\n";
  for (int c = 1; c <= kNumFaultClasses; ++c) out += stats_row(fault_class_name(c), class_errors(c));
  std::vector<double> latency(detection_latency.begin(), detection_latency.end());
  const auto lat = summarize_errors(latency);
  out += "# counters\n";
  out += "steps = " + std::to_string(steps) + "\n";
  out += "events = " + std::to_string(events) + "\n";
  out += "triggered = " + std::to_string(triggered) + "\n";
  out += "converged = " + std::to_string(converged) + "\n";
  out += "convergence_rate = " + format_exact(convergence_rate()) + "\n";
  out += "false_triggers = " + std::to_string(false_triggers) + "\n";
  out += "latency_median = " + format_exact(lat.median) + "\n";
  out += "latency_max = " + format_exact(lat.max) + "\n";
  return out;
}

std::string ScenarioResult::trace_csv() const {
  std::string out =
      "step,u1,u2,p1,p2,p3,p4,fl,m_p1,m_p2,m_p3,m_p4,m_fl,triggered,outcome,iterations,"
      "class,value,event";
  for (const auto p : kAllParameters) out += ",s_" + std::string(parameter_name(p));
  for (const auto p : kAllParameters) out += ",m_" + std::string(parameter_name(p));
  out += '\n';
  for (const auto& s : steps) {
    out += std::to_string(s.step) + "," + format_exact(s.u.u1) + "," + format_exact(s.u.u2);
    for (const double v : s.measured.to_array()) out += "," + format_exact(v);
    for (const double v : s.model.to_array()) out += "," + format_exact(v);
    out += std::string(",") + (s.report.triggered ? "1" : "0") + "," +
           std::string(outcome_name(s.report.outcome)) + "," +
           std::to_string(s.report.iterations) + "," + std::to_string(first_class(s.report)) +
           "," + format_exact(s.report.accepted_value) + "," + std::to_string(s.active_event);
    for (const auto p : kAllParameters) out += "," + format_exact(s.theta_physical[p]);
    for (const auto p : kAllParameters) out += "," + format_exact(s.theta_model[p]);
    out += '\n';
  }
  return out;
}

ScenarioResult run_scenario(const ScenarioSpec& spec, TwinState& twin, const FddModels& models) {
  spec.validate();
  twin.validate();

  ScenarioResult result;
  auto& m = result.metrics;
  PhysicalTwin physical(twin.theta_model, twin.cfg, spec.noise_percent, spec.seed);

  std::size_t next_event = 0;
  std::size_t next_control = 0;
  ControlVector u = spec.controls.front().u;
  int active = -1;
  bool resolved = true;
  bool detected = false;

  for (int t = 0; t < spec.steps; ++t) {
    while (next_control < spec.controls.size() && spec.controls[next_control].step == t) {
      u = spec.controls[next_control++].u;
    }
    if (next_event < spec.events.size() && spec.events[next_event].step == t) {
      const auto& e = spec.events[next_event];
      if (active >= 0 && !resolved &&
          t - spec.events[static_cast<std::size_t>(active)].step < spec.event_timeout) {
        throw ScheduleViolation("event at step " + std::to_string(t) +
                                " overlaps the unresolved event at step " +
                                std::to_string(spec.events[static_cast<std::size_t>(active)].step));
      }
      if (e.kind == EventKind::kReset) {
        physical.theta() = twin.theta_nominal;
        twin.theta_model = twin.theta_nominal;
      } else {
        physical.theta() = physical.theta().with(e.parameter, e.new_value);
        ++m.events;
      }
      active = static_cast<int>(next_event++);
      resolved = false;
      detected = false;
    }

    StepRecord rec;
    rec.step = t;
    rec.u = u;
    rec.active_event = active;
    rec.theta_physical = physical.theta();
    const bool in_sync = physical.theta() == twin.theta_model;
    rec.measured = step_physical_twin(physical, u);
    rec.model = model_output(u, twin);
    rec.report = run_fdd(rec.measured, u, twin, models);
    rec.theta_model = twin.theta_model;
    ++m.steps;

    const auto& report = rec.report;
    if (report.triggered && in_sync) ++m.false_triggers;
    if (active >= 0 && !resolved) {
      const auto& e = spec.events[static_cast<std::size_t>(active)];
      const bool fault = e.kind == EventKind::kFault;
      if (report.triggered && !detected) {
        detected = true;
        if (fault) {
          ++m.triggered;
          m.detection_latency.push_back(t - e.step);
          if (const int c = first_class(report); c > 0) {
            m.confusion.add(c, fault_class_of(e.parameter));
          }
        }
      }
      if (report.outcome == FddOutcome::kConverged) {
        resolved = true;
        if (fault) {
          ++m.converged;
          if (report.accepted_class == fault_class_of(e.parameter)) {
            const auto truth =
                committed_truth(u, rec.theta_physical, e.parameter, twin.theta_nominal, twin.cfg);
            if (truth) {
              m.estimation.push_back({report.accepted_class, to_index(e.parameter), *truth,
                                      report.accepted_value,
                                      std::abs(report.accepted_value - *truth) / *truth});
            }
          }
        }
      }
    }
    result.steps.push_back(std::move(rec));
  }
  return result;
}

CampaignMetrics evaluate_localization(const DecisionTree& classifier,
                                      std::span<const SampleRecord> test,
                                      const ComponentVector& nominal, const LoopConfig& cfg) {
  if (test.empty()) throw EmptyTestSet("no test records");
  const auto features = record_features(test, nominal, cfg);
  CampaignMetrics m;
  for (std::size_t i = 0; i < test.size(); ++i) {
    m.confusion.add(classifier.predict(features[i]), test[i].fault_class);
  }
  m.events = test.size();
  return m;
}

ErrorStats EstimationReport::class_errors(int fault_class) const {
  return errors_where(samples,
                      [&](const EstimationSample& s) { return s.fault_class == fault_class; });
}

ErrorStats EstimationReport::parameter_errors(int perturbed_index) const {
  return errors_where(samples, [&](const EstimationSample& s) {
    return s.perturbed_index == perturbed_index;
  });
}

std::string EstimationReport::to_csv() const {
  std::string out = "class,perturbed_index,truth,estimate,relative_error\n";
  for (const auto& s : samples) {
    out += std::to_string(s.fault_class) + "," + std::to_string(s.perturbed_index) + "," +
           format_exact(s.truth) + "," + format_exact(s.estimate) + "," +
           format_exact(s.relative_error) + "\n";
  }
  return out;
}

std::string EstimationReport::summary_csv() const {
  std::string out = "group,count,median,p90,max\n";
  for (int c = 1; c <= kNumFaultClasses; ++c) out += stats_row(fault_class_name(c), class_errors(c));
  for (const auto p : kAllParameters) {
    out += stats_row(std::string(parameter_name(p)), parameter_errors(to_index(p)));
  }
  return out;
}

EstimationReport evaluate_estimation(const EstimatorSet& estimators,
                                     const DecisionTree& classifier,
                                     std::span<const SampleRecord> test,
                                     const ComponentVector& nominal, const LoopConfig& cfg) {
  if (test.empty()) throw EmptyTestSet("no test records");
  const auto features = record_features(test, nominal, cfg);
  EstimationReport report;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto& r = test[i];
    if (classifier.predict(features[i]) != r.fault_class) {
      ++report.misclassified;
      continue;
    }
    const auto truth = estimation_target(r, nominal, cfg);
    if (!truth) {
      ++report.without_target;
      continue;
    }
    const double est = estimate(estimators, features[i], r.fault_class, nominal).value;
    report.samples.push_back(
        {r.fault_class, r.perturbed_index, *truth, est, std::abs(est - *truth) / *truth});
  }
  return report;
}

std::string CampaignResult::to_csv() const {
  std::string out =
      "event,u1,u2,parameter,multiplier,truth,triggered,outcome,iterations,first_class,"
      "accepted_class,accepted_value,relative_error\n";
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    out += std::to_string(i) + "," + format_exact(e.u.u1) + "," + format_exact(e.u.u2) + "," +
           std::to_string(to_index(e.parameter)) + "," + format_exact(e.multiplier) + "," +
           (e.committed_truth ? format_exact(*e.committed_truth) : std::string("nan")) + "," +
           (e.report.triggered ? "1" : "0") + "," + std::string(outcome_name(e.report.outcome)) +
           "," + std::to_string(e.report.iterations) + "," +
           std::to_string(first_class(e.report)) + "," +
           std::to_string(e.report.accepted_class) + "," +
           format_exact(e.report.accepted_value) + "," + format_exact(e.relative_error) + "\n";
  }
  return out;
}

CampaignResult run_campaign(const CampaignSpec& spec, const TwinState& twin,
                            const FddModels& models) {
  twin.validate();
  if (!(spec.min_deviation > 0.0) || !(spec.max_deviation >= spec.min_deviation) ||
      !(spec.max_deviation < 1.0)) {
    throw InvalidInput("campaign deviation range must satisfy 0 < min <= max < 1");
  }
  ControlVector{spec.u1_min, spec.u2_min}.validate();
  ControlVector{spec.u1_max, spec.u2_max}.validate();

  CampaignResult result;
  auto& m = result.metrics;
  Rng rng(spec.seed);
  for (std::size_t i = 0; i < spec.events; ++i) {
    CampaignEvent ev;
    ev.u = {rng.uniform(spec.u1_min, spec.u1_max), rng.uniform(spec.u2_min, spec.u2_max)};
    ev.parameter = parameter_from_index(1 + static_cast<int>(rng.below(6)));
    const double dev = rng.uniform(spec.min_deviation, spec.max_deviation);
    ev.multiplier = rng.below(2) == 0 ? 1.0 - dev : 1.0 + dev;
    const std::uint64_t noise_seed = rng.next();

    TwinState local = twin;
    const auto theta = twin.theta_model.with(ev.parameter, twin.theta_model[ev.parameter] * ev.multiplier);
    PhysicalTwin physical(theta, twin.cfg, spec.noise_percent, noise_seed);
    ev.committed_truth = committed_truth(ev.u, theta, ev.parameter, twin.theta_nominal, twin.cfg);
    const auto measured = step_physical_twin(physical, ev.u);
    ev.report = run_fdd(measured, ev.u, local, models);

    ++m.events;
    ++m.steps;
    const int truth_class = fault_class_of(ev.parameter);
    if (ev.report.triggered) {
      ++m.triggered;
      m.detection_latency.push_back(0);
      if (const int c = first_class(ev.report); c > 0) m.confusion.add(c, truth_class);
    }
    ev.relative_error = kNaN;
    if (ev.report.outcome == FddOutcome::kConverged) {
      ++m.converged;
      if (ev.report.accepted_class == truth_class && ev.committed_truth) {
        ev.relative_error =
            std::abs(ev.report.accepted_value - *ev.committed_truth) / *ev.committed_truth;
        m.estimation.push_back({truth_class, to_index(ev.parameter), *ev.committed_truth,
                                ev.report.accepted_value, ev.relative_error});
      }
    }
    result.events.push_back(std::move(ev));
  }
  return result;
}

}  // namespace hydrotwin
