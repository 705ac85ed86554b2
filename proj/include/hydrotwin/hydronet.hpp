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

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "hydrotwin/keyvalue.hpp"

namespace hydrotwin {

/// Actuator setpoints: pump speed and regulation valve opening, both in
/// percent.
struct ControlVector {
  double u1 = 0.0;
  double u2 = 0.0;

  /// Throws InvalidInput unless both setpoints are finite and in [0, 100].
  void validate() const;
  double speed_fraction() const { return u1 / 100.0; }

  friend bool operator==(const ControlVector&, const ControlVector&) = default;
};

/// Index of a component-vector entry. Values match the 1-based parameter
/// numbering used in datasets and reports.
enum class Parameter : int {
  kLoss1 = 1,
  kLoss3 = 2,
  kLossx = 3,
  kTankPressure = 4,
  kRatedHead = 5,
  kRatedFlow = 6,
};

inline constexpr std::array<Parameter, 6> kAllParameters = {
    Parameter::kLoss1,        Parameter::kLoss3,     Parameter::kLossx,
    Parameter::kTankPressure, Parameter::kRatedHead, Parameter::kRatedFlow};

constexpr int to_index(Parameter p) { return static_cast<int>(p); }
/// Throws InvalidInput for indices outside 1..6.
Parameter parameter_from_index(int index);
std::string_view parameter_name(Parameter p);
std::optional<Parameter> parameter_from_name(std::string_view name);

/// Internal loop parameters. Default-constructed values are the nominal
/// design point of the loop.
struct ComponentVector {
  double loss1 = 4.5;     // piping section 1 head-loss coefficient
  double loss3 = 1.17;    // piping section 3 head-loss coefficient
  double lossx = 10.35;   // heat exchanger head-loss coefficient
  double p_tank = 3.0;    // bar
  double hmt = 229.0;     // pump rated head, m
  double debit = 15.3;    // pump rated flow, m3/h

  static ComponentVector nominal() { return {}; }

  double operator[](Parameter p) const;
  double& operator[](Parameter p);
  ComponentVector with(Parameter p, double value) const;

  /// Throws InvalidInput unless every entry is finite and strictly positive.
  void validate() const;

  /// Reads `loss1 = ...` style overrides on top of `base`.
  static ComponentVector from_keyvalue(const KeyValueFile& file, ComponentVector base);
  static ComponentVector from_keyvalue(const KeyValueFile& file);
  std::string to_text() const;

  friend bool operator==(const ComponentVector&, const ComponentVector&) = default;
};

/// Observables at the five measurement nodes.
struct ProcessVector {
  double p1 = 0.0;  // pump outlet, bar
  double p2 = 0.0;  // pump inlet, bar
  double p3 = 0.0;  // exchanger inlet, bar
  double p4 = 0.0;  // exchanger outlet, bar
  double fl = 0.0;  // loop flow, m3/h

  std::array<double, 5> to_array() const { return {p1, p2, p3, p4, fl}; }
  static ProcessVector from_array(const std::array<double, 5>& a) {
    return {a[0], a[1], a[2], a[3], a[4]};
  }

  friend bool operator==(const ProcessVector&, const ProcessVector&) = default;
};

/// Constants of the reconstructed loop model that are not fault parameters.
struct LoopConfig {
  double pipe_diameter = 0.025;  // m
  double k_section2 = 0.5;
  double kv100 = 2.0;            // valve loss coefficient at full opening
  double pump_c0 = 1.25;         // shutoff-head factor
  double pump_c2 = 0.25;         // droop factor
  double rho = 1000.0;           // kg/m3
  double g = 9.81;               // m/s2

  /// Throws InvalidInput unless all fields are positive and
  /// pump_c0 - pump_c2 == 1 (the rated point lies on the pump curve).
  void validate() const;

  static LoopConfig from_keyvalue(const KeyValueFile& file, LoopConfig base);
  static LoopConfig from_keyvalue(const KeyValueFile& file);
  std::string to_text() const;

  friend bool operator==(const LoopConfig&, const LoopConfig&) = default;
};

/// Converts a fluid column height in meters to bar.
double head_to_bar(double head_m, const LoopConfig& cfg);

/// v^2 / (2 g) in meters for a flow in m3/h through the loop pipe.
double velocity_head(double flow_m3h, const LoopConfig& cfg);

/// Affinity-law pump curve H = hmt (c0 s^2 - c2 (q / debit)^2). May be
/// negative beyond the curve's zero-head flow.
double pump_head(double flow_m3h, double speed_fraction, const ComponentVector& theta,
                 const LoopConfig& cfg);

/// Combined coefficient of the exchanger and the regulation valve in
/// parallel. A closed valve leaves the exchanger branch alone.
double parallel_loss_coefficient(double u2, double lossx, const LoopConfig& cfg);

/// Total network head loss (m) at the given flow and valve opening.
double network_head_loss(double flow_m3h, double u2, const ComponentVector& theta,
                         const LoopConfig& cfg);

/// Flow (m3/h) where the pump curve meets the network curve. Bracketed
/// bisection on [0, zero-head flow]; throws NoConvergence if 200 halvings do
/// not bring the head residual under 1e-6 m.
double solve_operating_point(const ControlVector& u, const ComponentVector& theta,
                             const LoopConfig& cfg);

/// Steady-state process vector. Pressures are walked from the tank
/// reference: tank -> section 3 -> pump -> section 1 -> exchanger/valve.
ProcessVector simulate(const ControlVector& u, const ComponentVector& theta,
                       const LoopConfig& cfg);

/// Rated head that makes a pump with rated flow `debit` deliver `head_m` at
/// `flow_m3h` and speed `u.u1`. NaN when no positive rated head can.
double equivalent_rated_head(const ControlVector& u, double flow_m3h, double head_m,
                             double debit, const LoopConfig& cfg);

}  // namespace hydrotwin
