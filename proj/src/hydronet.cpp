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

#include "hydrotwin/hydronet.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hydrotwin/errors.hpp"

namespace hydrotwin {
namespace {

constexpr int kMaxBisections = 200;
constexpr double kHeadTolerance = 1e-6;  // m

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

void require_positive(double v, std::string_view name) {
  if (!positive_finite(v)) {
    throw InvalidInput(std::string(name) + " must be finite and > 0, got " +
                       format_exact(v));
  }
}

}  // namespace

void ControlVector::validate() const {
  auto check = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0 || v > 100.0) {
      throw InvalidInput(std::string(name) + " must be in [0, 100], got " +
                         format_exact(v));
    }
  };
  check(u1, "u1");
  check(u2, "u2");
}

Parameter parameter_from_index(int index) {
  if (index < 1 || index > 6) {
    throw InvalidInput("parameter index must be in 1..6, got " + std::to_string(index));
  }
  return static_cast<Parameter>(index);
}

std::string_view parameter_name(Parameter p) {
  switch (p) {
    case Parameter::kLoss1: return "loss1";
    case Parameter::kLoss3: return "loss3";
    case Parameter::kLossx: return "lossx";
    case Parameter::kTankPressure: return "p_tank";
    case Parameter::kRatedHead: return "hmt";
    case Parameter::kRatedFlow: return "debit";
  }
  return "?";
}

std::optional<Parameter> parameter_from_name(std::string_view name) {
  for (const auto p : kAllParameters) {
    if (parameter_name(p) == name) return p;
  }
  return std::nullopt;
}

double ComponentVector::operator[](Parameter p) const {
  return const_cast<ComponentVector&>(*this)[p];
}

double& ComponentVector::operator[](Parameter p) {
  switch (p) {
    case Parameter::kLoss1: return loss1;
    case Parameter::kLoss3: return loss3;
    case Parameter::kLossx: return lossx;
    case Parameter::kTankPressure: return p_tank;
    case Parameter::kRatedHead: return hmt;
    case Parameter::kRatedFlow: return debit;
  }
  throw InvalidInput("bad parameter");
}

ComponentVector ComponentVector::with(Parameter p, double value) const {
  ComponentVector out = *this;
  out[p] = value;
  return out;
}

void ComponentVector::validate() const {
  for (const auto p : kAllParameters) require_positive((*this)[p], parameter_name(p));
}

ComponentVector ComponentVector::from_keyvalue(const KeyValueFile& file,
                                               ComponentVector base) {
  for (const auto p : kAllParameters) {
    if (const auto v = file.number(parameter_name(p))) base[p] = *v;
  }
  base.validate();
  return base;
}

ComponentVector ComponentVector::from_keyvalue(const KeyValueFile& file) {
  return from_keyvalue(file, ComponentVector{});
}

std::string ComponentVector::to_text() const {
  std::ostringstream out;
  for (const auto p : kAllParameters) {
    out << parameter_name(p) << " = " << format_exact((*this)[p]) << '\n';
  }
  return out.str();
}

void LoopConfig::validate() const {
  require_positive(pipe_diameter, "pipe_diameter");
  require_positive(k_section2, "k_section2");
  require_positive(kv100, "kv100");
  require_positive(pump_c0, "pump_c0");
  require_positive(pump_c2, "pump_c2");
  require_positive(rho, "rho");
  require_positive(g, "g");
  if (std::abs(pump_c0 - pump_c2 - 1.0) > 1e-12) {
    throw InvalidInput("pump_c0 - pump_c2 must equal 1");
  }
}

LoopConfig LoopConfig::from_keyvalue(const KeyValueFile& file, LoopConfig base) {
  const auto set = [&](std::string_view key, double& field) {
    if (const auto v = file.number(key)) field = *v;
  };
  set("pipe_diameter", base.pipe_diameter);
  set("k_section2", base.k_section2);
  set("kv100", base.kv100);
  set("pump_c0", base.pump_c0);
  set("pump_c2", base.pump_c2);
  set("rho", base.rho);
  set("g", base.g);
  base.validate();
  return base;
}

LoopConfig LoopConfig::from_keyvalue(const KeyValueFile& file) {
  return from_keyvalue(file, LoopConfig{});
}

std::string LoopConfig::to_text() const {
  std::ostringstream out;
  out << "pipe_diameter = " << format_exact(pipe_diameter) << '\n'
      << "k_section2 = " << format_exact(k_section2) << '\n'
      << "kv100 = " << format_exact(kv100) << '\n'
      << "pump_c0 = " << format_exact(pump_c0) << '\n'
      << "pump_c2 = " << format_exact(pump_c2) << '\n'
      << "rho = " << format_exact(rho) << '\n'
      << "g = " << format_exact(g) << '\n';
  return out.str();
}

double head_to_bar(double head_m, const LoopConfig& cfg) {
  return cfg.rho * cfg.g * head_m / 1e5;
}

double velocity_head(double flow_m3h, const LoopConfig& cfg) {
  const double area = std::numbers::pi * cfg.pipe_diameter * cfg.pipe_diameter / 4.0;
  const double v = flow_m3h / 3600.0 / area;
  return v * v / (2.0 * cfg.g);
}

double pump_head(double flow_m3h, double speed_fraction, const ComponentVector& theta,
                 const LoopConfig& cfg) {
  const double r = flow_m3h / theta.debit;
  return theta.hmt *
         (cfg.pump_c0 * speed_fraction * speed_fraction - cfg.pump_c2 * r * r);
}

double parallel_loss_coefficient(double u2, double lossx, const LoopConfig& cfg) {
  if (u2 <= 0.0) return lossx;
  const double opening = u2 / 100.0;
  const double k_valve = cfg.kv100 / (opening * opening);
  const double c = 1.0 / std::sqrt(lossx) + 1.0 / std::sqrt(k_valve);
  return 1.0 / (c * c);
}

double network_head_loss(double flow_m3h, double u2, const ComponentVector& theta,
                         const LoopConfig& cfg) {
  const double k_total = theta.loss1 + cfg.k_section2 + theta.loss3 +
                         parallel_loss_coefficient(u2, theta.lossx, cfg);
  return k_total * velocity_head(flow_m3h, cfg);
}

double solve_operating_point(const ControlVector& u, const ComponentVector& theta,
                             const LoopConfig& cfg) {
  u.validate();
  theta.validate();
  cfg.validate();

  const double s = u.speed_fraction();
  if (s == 0.0) return 0.0;

  const auto residual = [&](double q) {
    return pump_head(q, s, theta, cfg) - network_head_loss(q, u.u2, theta, cfg);
  };

  // residual(0) > 0 and residual(hi) = -loss(hi) < 0, so [lo, hi] brackets
  // the unique root of a strictly decreasing function.
  double lo = 0.0;
  double hi = theta.debit * s * std::sqrt(cfg.pump_c0 / cfg.pump_c2);
  double f_lo = residual(lo);
  double f_hi = residual(hi);

  for (int i = 0; i < kMaxBisections; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;  // interval collapsed to adjacent doubles
    const double f_mid = residual(mid);
    if (f_mid == 0.0) return mid;
    if (f_mid > 0.0) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }

  const double q = std::abs(f_lo) <= std::abs(f_hi) ? lo : hi;
  const double best = std::min(std::abs(f_lo), std::abs(f_hi));
  if (!(best < kHeadTolerance)) {
    throw NoConvergence("operating point: head residual " + format_exact(best) +
                        " m after bisection budget");
  }
  return q;
}

ProcessVector simulate(const ControlVector& u, const ComponentVector& theta,
                       const LoopConfig& cfg) {
  const double q = solve_operating_point(u, theta, cfg);
  const double vh = velocity_head(q, cfg);
  const double k_par = parallel_loss_coefficient(u.u2, theta.lossx, cfg);

  ProcessVector y;
  y.fl = q;
  y.p2 = theta.p_tank - head_to_bar(theta.loss3 * vh, cfg);
  y.p1 = y.p2 + head_to_bar(pump_head(q, u.speed_fraction(), theta, cfg), cfg);
  y.p3 = y.p1 - head_to_bar(theta.loss1 * vh, cfg);
  y.p4 = y.p3 - head_to_bar(k_par * vh, cfg);
  return y;
}

double equivalent_rated_head(const ControlVector& u, double flow_m3h, double head_m,
                             double debit, const LoopConfig& cfg) {
  const double s = u.speed_fraction();
  const double r = flow_m3h / debit;
  const double shape = cfg.pump_c0 * s * s - cfg.pump_c2 * r * r;
  if (!(shape > 0.0) || !(head_m > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return head_m / shape;
}

}  // namespace hydrotwin
