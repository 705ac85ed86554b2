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

#include "hydrotwin/features.hpp"

namespace hydrotwin {

FeatureVector make_features(const ControlVector& u, const ProcessVector& measured,
                            const ProcessVector& model) {
  return {u.u1,
          u.u2,
          measured.p1 - model.p1,
          measured.p2 - model.p2,
          measured.p3 - model.p3,
          measured.p4 - model.p4,
          measured.fl - model.fl};
}

std::vector<FeatureVector> record_features(std::span<const SampleRecord> records,
                                           const ComponentVector& nominal,
                                           const LoopConfig& cfg) {
  std::vector<FeatureVector> out;
  out.reserve(records.size());
  // Records are grouped by operating point, so the reference is reused.
  ControlVector last{-1.0, -1.0};
  ProcessVector reference;
  for (const auto& r : records) {
    if (!(r.u == last)) {
      reference = simulate(r.u, nominal, cfg);
      last = r.u;
    }
    out.push_back(make_features(r.u, r.y, reference));
  }
  return out;
}

std::vector<int> record_labels(std::span<const SampleRecord> records) {
  std::vector<int> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.fault_class);
  return out;
}

}  // namespace hydrotwin
