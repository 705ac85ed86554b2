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

#include "hydrotwin/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "hydrotwin/errors.hpp"
#include "hydrotwin/random.hpp"

namespace hydrotwin {
namespace {

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_exact(values[i]);
  }
  return out;
}

void check_setpoints(const std::vector<double>& grid, const char* name) {
  if (grid.empty()) throw EmptyPlan(std::string(name) + " is empty");
  for (const double v : grid) {
    if (!std::isfinite(v) || v < 0.0 || v > 100.0) {
      throw InvalidInput(std::string(name) + " value out of [0, 100]: " + format_exact(v));
    }
  }
}

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Parameter committed_parameter(int fault_class) {
  if (fault_class < 1 || fault_class > kNumFaultClasses) {
    throw InvalidInput("fault class must be in 1..5, got " + std::to_string(fault_class));
  }
  return fault_class == 5 ? Parameter::kRatedHead : parameter_from_index(fault_class);
}

SamplingPlan SamplingPlan::desk_default() {
  SamplingPlan plan;
  for (int u1 = 25; u1 <= 90; u1 += 5) plan.u1_grid.push_back(u1);
  for (int u2 = 10; u2 < 100; u2 += 7) plan.u2_grid.push_back(u2);
  plan.u2_grid.push_back(100);
  const std::vector<double> m = {0.5, 0.6, 0.7, 0.8, 0.9, 0.95,
                                 1.05, 1.1, 1.2, 1.3, 1.4, 1.5};
  plan.multipliers.fill(m);
  return plan;
}

void SamplingPlan::validate() const {
  check_setpoints(u1_grid, "u1_grid");
  check_setpoints(u2_grid, "u2_grid");
  bool any = false;
  for (std::size_t i = 0; i < multipliers.size(); ++i) {
    for (const double m : multipliers[i]) {
      if (!std::isfinite(m) || m <= 0.0) {
        throw InvalidInput("multiplier must be finite and > 0: " + format_exact(m));
      }
      if (std::abs(m - 1.0) < kMultiplierDeadBand) {
        throw InvalidInput("multiplier " + format_exact(m) +
                           " lies in the no-fault dead band around 1");
      }
    }
    any = any || !multipliers[i].empty();
  }
  if (!any) throw EmptyPlan("no parameter has a multiplier grid");
}

std::size_t SamplingPlan::expected_records() const {
  std::size_t per_point = 0;
  for (const auto& m : multipliers) per_point += m.size();
  return u1_grid.size() * u2_grid.size() * per_point;
}

SamplingPlan SamplingPlan::from_keyvalue(const KeyValueFile& file) {
  SamplingPlan plan = desk_default();
  if (auto v = file.numbers("u1_grid")) plan.u1_grid = *v;
  if (auto v = file.numbers("u2_grid")) plan.u2_grid = *v;
  if (auto v = file.numbers("multipliers")) plan.multipliers.fill(*v);
  for (const auto p : kAllParameters) {
    const std::string key = "multipliers." + std::string(parameter_name(p));
    if (auto v = file.numbers(key)) plan.multipliers[to_index(p) - 1] = *v;
  }
  if (const auto* e = file.find("parameters")) {
    std::array<bool, 6> keep{};
    for (const double idx : parse_number_list(e->value, e->line)) {
      if (idx != std::floor(idx) || idx < 1 || idx > 6) {
        throw ParseError("parameters must be integers in 1..6", e->line);
      }
      keep[static_cast<std::size_t>(idx) - 1] = true;
    }
    for (std::size_t i = 0; i < keep.size(); ++i) {
      if (!keep[i]) plan.multipliers[i].clear();
    }
  }
  if (const auto* e = file.find("seed")) {
    const double s = parse_number(e->value, e->line);
    if (s < 0 || s != std::floor(s)) throw ParseError("seed must be a non-negative integer", e->line);
    plan.seed = static_cast<std::uint64_t>(s);
  }
  plan.validate();
  return plan;
}

std::string SamplingPlan::to_text() const {
  std::ostringstream out;
  out << "u1_grid = " << join(u1_grid) << '\n' << "u2_grid = " << join(u2_grid) << '\n';
  for (const auto p : kAllParameters) {
    out << "multipliers." << parameter_name(p) << " = "
        << join(multipliers[to_index(p) - 1]) << '\n';
  }
  out << "seed = " << seed << '\n';
  return out.str();
}

GenerationResult generate(const SamplingPlan& plan, const ComponentVector& nominal,
                          const LoopConfig& cfg) {
  plan.validate();
  nominal.validate();
  cfg.validate();

  struct Job {
    ControlVector u;
    Parameter parameter;
    double value;
  };
  std::vector<Job> jobs;
  jobs.reserve(plan.expected_records());
  for (const double u1 : plan.u1_grid) {
    for (const double u2 : plan.u2_grid) {
      for (const auto p : kAllParameters) {
        for (const double m : plan.multipliers[to_index(p) - 1]) {
          jobs.push_back({{u1, u2}, p, nominal[p] * m});
        }
      }
    }
  }

  std::vector<std::optional<SampleRecord>> slots(jobs.size());
  const auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Job& job = jobs[i];
      try {
        const auto y = simulate(job.u, nominal.with(job.parameter, job.value), cfg);
        slots[i] = SampleRecord{job.u, y, fault_class_of(job.parameter),
                                to_index(job.parameter), job.value};
      } catch (const NoConvergence&) {
        // dropped, counted below
      }
    }
  };

  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
  if (workers == 1 || jobs.size() < 1024) {
    run_range(0, jobs.size());
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (jobs.size() + workers - 1) / workers;
    for (std::size_t begin = 0; begin < jobs.size(); begin += chunk) {
      pool.emplace_back(run_range, begin, std::min(jobs.size(), begin + chunk));
    }
  }

  GenerationResult result;
  result.records.reserve(jobs.size());
  for (auto& slot : slots) {
    if (slot) {
      result.records.push_back(*slot);
    } else {
      ++result.dropped;
    }
  }
  return result;
}

SplitResult split(std::span<const SampleRecord> records, double train_fraction,
                  std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidInput("train_fraction must be in (0, 1)");
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < records.size(); ++i) {
    by_class[records[i].fault_class].push_back(i);
  }

  Rng rng(seed);
  SplitResult out;
  for (auto& [label, idx] : by_class) {
    if (idx.size() < 2) {
      throw TooFewSamples("class " + std::to_string(label) + " has " +
                          std::to_string(idx.size()) + " record(s); need at least 2");
    }
    rng.shuffle(idx);
    auto n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(idx.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      (k < n_train ? out.train : out.test).push_back(records[idx[k]]);
    }
  }
  return out;
}

std::string records_to_csv(std::span<const SampleRecord> records) {
  std::string out(kDatasetHeader);
  out += '\n';
  for (const auto& r : records) {
    out += format17(r.u.u1) + ',' + format17(r.u.u2) + ',' + format17(r.y.p1) + ',' +
           format17(r.y.p2) + ',' + format17(r.y.p3) + ',' + format17(r.y.p4) + ',' +
           format17(r.y.fl) + ',' + std::to_string(r.fault_class) + ',' +
           std::to_string(r.perturbed_index) + ',' + format17(r.true_value) + '\n';
  }
  return out;
}

std::vector<SampleRecord> records_from_csv(std::string_view text) {
  std::vector<SampleRecord> out;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (!header_seen) {
      if (line != kDatasetHeader) throw ParseError("unexpected dataset header", line_no);
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;

    std::array<double, 10> f{};
    std::size_t n = 0;
    while (true) {
      const auto comma = line.find(',');
      if (n == f.size()) throw ParseError("row has more than 10 fields", line_no);
      f[n++] = parse_number(line.substr(0, comma), line_no);
      if (comma == std::string_view::npos) break;
      line = line.substr(comma + 1);
    }
    if (n != f.size()) {
      throw ParseError("row has " + std::to_string(n) + " fields, expected 10", line_no);
    }

    SampleRecord r;
    r.u = {f[0], f[1]};
    r.y = {f[2], f[3], f[4], f[5], f[6]};
    if (f[7] != std::floor(f[7]) || f[8] != std::floor(f[8]) || f[8] < 1 || f[8] > 6) {
      throw ParseError("bad fault_class/perturbed_index", line_no);
    }
    r.fault_class = static_cast<int>(f[7]);
    r.perturbed_index = static_cast<int>(f[8]);
    if (r.fault_class != fault_class_of(parameter_from_index(r.perturbed_index))) {
      throw ParseError("fault_class does not match perturbed_index", line_no);
    }
    r.true_value = f[9];
    out.push_back(r);
  }
  if (!header_seen) throw ParseError("missing dataset header", 1);
  return out;
}

void save_records(std::span<const SampleRecord> records, const std::filesystem::path& path) {
  write_text_file(path, records_to_csv(records));
}

std::vector<SampleRecord> load_records(const std::filesystem::path& path) {
  return records_from_csv(read_text_file(path));
}

ComponentVector record_theta(const SampleRecord& r, const ComponentVector& nominal) {
  return nominal.with(parameter_from_index(r.perturbed_index), r.true_value);
}

}  // namespace hydrotwin
