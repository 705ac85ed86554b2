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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>

#include "hydrotwin/dataset.hpp"
#include "hydrotwin/errors.hpp"
#include "hydrotwin/fdd.hpp"
#include "hydrotwin/hydronet.hpp"
#include "hydrotwin/metrics.hpp"
#include "hydrotwin/scenario.hpp"
#include "hydrotwin/training.hpp"

namespace py = pybind11;
using namespace hydrotwin;

namespace {

ControlVector controls(double u1, double u2) {
  ControlVector u{u1, u2};
  u.validate();
  return u;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hydraulic loop digital twin with fault detection and diagnosis";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<InvalidInput>(m, "InvalidInput", base.ptr());
  py::register_exception<NoConvergence>(m, "NoConvergence", base.ptr());
  py::register_exception<TooFewSamples>(m, "TooFewSamples", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<MissingEstimator>(m, "MissingEstimator", base.ptr());
  py::register_exception<EmptyTestSet>(m, "EmptyTestSet", base.ptr());

  py::enum_<Parameter>(m, "Parameter")
      .value("LOSS1", Parameter::kLoss1)
      .value("LOSS3", Parameter::kLoss3)
      .value("LOSSX", Parameter::kLossx)
      .value("TANK_PRESSURE", Parameter::kTankPressure)
      .value("RATED_HEAD", Parameter::kRatedHead)
      .value("RATED_FLOW", Parameter::kRatedFlow);

  py::class_<ControlVector>(m, "ControlVector")
      .def(py::init(&controls), py::arg("u1"), py::arg("u2"))
      .def_readwrite("u1", &ControlVector::u1)
      .def_readwrite("u2", &ControlVector::u2)
      .def("__repr__", [](const ControlVector& u) {
        return "ControlVector(u1=" + std::to_string(u.u1) + ", u2=" + std::to_string(u.u2) + ")";
      });

  py::class_<ComponentVector>(m, "ComponentVector")
      .def(py::init<>())
      .def_readwrite("loss1", &ComponentVector::loss1)
      .def_readwrite("loss3", &ComponentVector::loss3)
      .def_readwrite("lossx", &ComponentVector::lossx)
      .def_readwrite("p_tank", &ComponentVector::p_tank)
      .def_readwrite("hmt", &ComponentVector::hmt)
      .def_readwrite("debit", &ComponentVector::debit)
      .def("with_value", &ComponentVector::with, py::arg("parameter"), py::arg("value"))
      .def("__getitem__", [](const ComponentVector& t, Parameter p) { return t[p]; })
      .def("__eq__", [](const ComponentVector& a, const ComponentVector& b) { return a == b; })
      .def("__repr__", &ComponentVector::to_text);

  py::class_<ProcessVector>(m, "ProcessVector")
      .def(py::init<>())
      .def_readwrite("p1", &ProcessVector::p1)
      .def_readwrite("p2", &ProcessVector::p2)
      .def_readwrite("p3", &ProcessVector::p3)
      .def_readwrite("p4", &ProcessVector::p4)
      .def_readwrite("fl", &ProcessVector::fl)
      .def("to_list", &ProcessVector::to_array)
      .def_static("from_list", &ProcessVector::from_array);

  py::class_<LoopConfig>(m, "LoopConfig")
      .def(py::init<>())
      .def_readwrite("pipe_diameter", &LoopConfig::pipe_diameter)
      .def_readwrite("k_section2", &LoopConfig::k_section2)
      .def_readwrite("kv100", &LoopConfig::kv100)
      .def_readwrite("pump_c0", &LoopConfig::pump_c0)
      .def_readwrite("pump_c2", &LoopConfig::pump_c2);

  m.def(
      "simulate",
      [](double u1, double u2, const ComponentVector& theta, const LoopConfig& cfg) {
        return simulate(controls(u1, u2), theta, cfg);
      },
      py::arg("u1"), py::arg("u2"), py::arg("theta") = ComponentVector{},
      py::arg("config") = LoopConfig{});
  m.def(
      "solve_flow",
      [](double u1, double u2, const ComponentVector& theta, const LoopConfig& cfg) {
        return solve_operating_point(controls(u1, u2), theta, cfg);
      },
      py::arg("u1"), py::arg("u2"), py::arg("theta") = ComponentVector{},
      py::arg("config") = LoopConfig{});

  py::class_<SampleRecord>(m, "SampleRecord")
      .def_readonly("u", &SampleRecord::u)
      .def_readonly("y", &SampleRecord::y)
      .def_readonly("fault_class", &SampleRecord::fault_class)
      .def_readonly("perturbed_index", &SampleRecord::perturbed_index)
      .def_readonly("true_value", &SampleRecord::true_value);

  py::class_<SamplingPlan>(m, "SamplingPlan")
      .def(py::init<>())
      .def_static("desk_default", &SamplingPlan::desk_default)
      .def_readwrite("u1_grid", &SamplingPlan::u1_grid)
      .def_readwrite("u2_grid", &SamplingPlan::u2_grid)
      .def_readwrite("multipliers", &SamplingPlan::multipliers)
      .def("expected_records", &SamplingPlan::expected_records);

  m.def(
      "generate",
      [](const SamplingPlan& plan, const ComponentVector& nominal, const LoopConfig& cfg) {
        py::gil_scoped_release release;
        return generate(plan, nominal, cfg).records;
      },
      py::arg("plan"), py::arg("nominal") = ComponentVector{}, py::arg("config") = LoopConfig{});
  m.def(
      "split",
      [](const std::vector<SampleRecord>& records, double fraction, std::uint64_t seed) {
        auto parts = split(records, fraction, seed);
        return py::make_tuple(std::move(parts.train), std::move(parts.test));
      },
      py::arg("records"), py::arg("train_fraction") = 0.8, py::arg("seed") = 1);
  m.def("records_to_csv", [](const std::vector<SampleRecord>& r) { return records_to_csv(r); });
  m.def("records_from_csv", [](const std::string& text) { return records_from_csv(text); });

  py::class_<FddModels>(m, "FddModels")
      .def("save", [](const FddModels& fm, const std::filesystem::path& dir) { save_models(fm, dir); })
      .def_static("load", &load_models);

  m.def(
      "train",
      [](const std::vector<SampleRecord>& train, const ComponentVector& nominal,
         const LoopConfig& cfg) {
        py::gil_scoped_release release;
        return train_models(train, nominal, cfg);
      },
      py::arg("records"), py::arg("nominal") = ComponentVector{}, py::arg("config") = LoopConfig{});

  py::class_<ConfusionMatrix>(m, "ConfusionMatrix")
      .def(py::init<>())
      .def(py::init<const ConfusionMatrix::Counts&>())
      .def("at", &ConfusionMatrix::at, py::arg("predicted"), py::arg("truth"))
      .def("total", &ConfusionMatrix::total)
      .def("overall_accuracy", &ConfusionMatrix::overall_accuracy)
      .def("class_accuracy_percent", &ConfusionMatrix::class_accuracy_percent)
      .def("format_counts", &ConfusionMatrix::format_counts)
      .def("format_percent", &ConfusionMatrix::format_percent);

  m.def(
      "evaluate_localization",
      [](const FddModels& models, const std::vector<SampleRecord>& test,
         const ComponentVector& nominal, const LoopConfig& cfg) {
        return evaluate_localization(models.classifier, test, nominal, cfg).confusion;
      },
      py::arg("models"), py::arg("records"), py::arg("nominal") = ComponentVector{},
      py::arg("config") = LoopConfig{});

  py::class_<ThresholdVector>(m, "ThresholdVector")
      .def_static("detection_default", &ThresholdVector::detection_default)
      .def_static("validation_default", &ThresholdVector::validation_default)
      .def_readwrite("values", &ThresholdVector::values);

  m.def(
      "detect",
      [](const ProcessVector& measured, const ProcessVector& model, const ThresholdVector& lim) {
        return detect(measured, model, lim).triggered;
      },
      py::arg("measured"), py::arg("model"),
      py::arg("limits") = ThresholdVector::detection_default());

  py::class_<TwinState>(m, "TwinState")
      .def(py::init<>())
      .def_readwrite("theta_model", &TwinState::theta_model)
      .def_readwrite("theta_nominal", &TwinState::theta_nominal)
      .def_readwrite("config", &TwinState::cfg)
      .def_readwrite("detection", &TwinState::detection)
      .def_readwrite("validation", &TwinState::validation)
      .def_readwrite("max_iterations", &TwinState::max_iterations);

  py::enum_<FddOutcome>(m, "FddOutcome")
      .value("NO_FAULT", FddOutcome::kNoFault)
      .value("CONVERGED", FddOutcome::kConverged)
      .value("FAILED_TO_CONVERGE", FddOutcome::kFailedToConverge);

  py::class_<FddReport>(m, "FddReport")
      .def_readonly("triggered", &FddReport::triggered)
      .def_readonly("iterations", &FddReport::iterations)
      .def_readonly("outcome", &FddReport::outcome)
      .def_readonly("accepted_class", &FddReport::accepted_class)
      .def_readonly("accepted_value", &FddReport::accepted_value)
      .def_readonly("final_theta", &FddReport::final_theta)
      .def("__str__", &FddReport::to_text);

  m.def(
      "run_fdd",
      [](const ProcessVector& measured, double u1, double u2, TwinState& twin,
         const FddModels& models) { return run_fdd(measured, controls(u1, u2), twin, models); },
      py::arg("measured"), py::arg("u1"), py::arg("u2"), py::arg("twin"), py::arg("models"));

  py::class_<CampaignSpec>(m, "CampaignSpec")
      .def(py::init<>())
      .def_readwrite("events", &CampaignSpec::events)
      .def_readwrite("seed", &CampaignSpec::seed)
      .def_readwrite("min_deviation", &CampaignSpec::min_deviation)
      .def_readwrite("max_deviation", &CampaignSpec::max_deviation)
      .def_readwrite("noise_percent", &CampaignSpec::noise_percent);

  m.def(
      "run_campaign",
      [](const CampaignSpec& spec, const TwinState& twin, const FddModels& models) {
        CampaignResult r;
        {
          py::gil_scoped_release release;
          r = run_campaign(spec, twin, models);
        }
        py::dict out;
        out["events"] = r.metrics.events;
        out["triggered"] = r.metrics.triggered;
        out["converged"] = r.metrics.converged;
        out["false_triggers"] = r.metrics.false_triggers;
        out["csv"] = r.to_csv();
        return out;
      },
      py::arg("spec"), py::arg("twin"), py::arg("models"));
}
