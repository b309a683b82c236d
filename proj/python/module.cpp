#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "romes/pipeline.hpp"

namespace py = pybind11;
using namespace romes;

PYBIND11_MODULE(_romes, m) {
  m.doc() = "thermal-block reduced-order models with regression error "
            "surrogates";

  // ---- mesh / operator --------------------------------------------------
  py::class_<TriangularMesh>(m, "TriangularMesh")
      .def_readonly("nodes", &TriangularMesh::nodes)
      .def_readonly("triangles", &TriangularMesh::triangles)
      .def_readonly("block_of_triangle", &TriangularMesh::block_of_triangle)
      .def_readonly("divisions", &TriangularMesh::divisions)
      .def_property_readonly("n_nodes", &TriangularMesh::n_nodes)
      .def_property_readonly("n_triangles", &TriangularMesh::n_triangles)
      .def_property_readonly("n_dofs", &TriangularMesh::n_dofs);
  m.def("build_mesh", &build_mesh, py::arg("divisions_per_side"));
  m.def("nearest_free_dof", &nearest_free_dof);

  py::class_<AffineOperator>(m, "AffineOperator")
      .def_readonly("n", &AffineOperator::n)
      .def_readonly("rhs", &AffineOperator::rhs)
      .def_property_readonly("output_ids", [](const AffineOperator& op) {
        std::vector<std::string> ids;
        for (const auto& [k, v] : op.output_vectors) ids.push_back(k);
        return ids;
      });
  m.def("assemble_affine_components", &assemble_affine_components);
  m.def("assemble_full", &assemble_full);
  m.def("solve_hifi", &solve_hifi);
  m.def("compliant_output", &compliant_output);
  m.def("point_output", &point_output);
  m.def("energy_norm", &energy_norm);
  m.def("x_norm", &x_norm);
  m.def("coercivity_lower_bound", &coercivity_lower_bound);
  m.def("continuity_upper_bound", &continuity_upper_bound);
  m.def("export_json", &export_json);

  // ---- reduced models ---------------------------------------------------
  py::enum_<Weighting>(m, "Weighting")
      .value("Riesz", Weighting::Riesz)
      .value("Euclid", Weighting::Euclid);

  py::class_<ReducedBasis>(m, "ReducedBasis")
      .def(py::init<>())
      .def_readwrite("V", &ReducedBasis::V)
      .def_readonly("snapshot_inputs", &ReducedBasis::snapshot_inputs)
      .def_property_readonly("p", &ReducedBasis::p);

  py::class_<GreedyOptions>(m, "GreedyOptions")
      .def(py::init<>())
      .def(py::init([](double tol, int max_p, uint64_t seed) {
             return GreedyOptions{tol, max_p, seed};
           }),
           py::arg("tol"), py::arg("max_p"), py::arg("seed"))
      .def_readwrite("tol", &GreedyOptions::tol)
      .def_readwrite("max_p", &GreedyOptions::max_p)
      .def_readwrite("seed", &GreedyOptions::seed);

  py::class_<GreedyResult>(m, "GreedyResult")
      .def_readonly("basis", &GreedyResult::basis)
      .def_readonly("max_bound_history", &GreedyResult::max_bound_history)
      .def_readonly("skipped_dependent", &GreedyResult::skipped_dependent);

  py::class_<ProjectedSystem>(m, "ProjectedSystem")
      .def_readonly("basis", &ProjectedSystem::basis);

  py::class_<ReducedModel>(m, "ReducedModel")
      .def_readonly("primal", &ReducedModel::primal)
      .def_readonly("n", &ReducedModel::n)
      .def_readonly("greedy_seed", &ReducedModel::greedy_seed)
      .def_property_readonly("dual_ids", [](const ReducedModel& rm) {
        std::vector<std::string> ids;
        for (const auto& [k, v] : rm.duals) ids.push_back(k);
        return ids;
      });

  py::class_<BoundSet>(m, "BoundSet")
      .def_readonly("energy_ub", &BoundSet::energy_ub)
      .def_readonly("energy_lb", &BoundSet::energy_lb)
      .def_readonly("x_ub", &BoundSet::x_ub)
      .def_readonly("x_lb", &BoundSet::x_lb)
      .def_readonly("output_ub", &BoundSet::output_ub)
      .def_readonly("output_lb", &BoundSet::output_lb)
      .def_readonly("residual_riesz", &BoundSet::residual_riesz)
      .def_readonly("residual_euclid", &BoundSet::residual_euclid)
      .def_readonly("alpha_lb", &BoundSet::alpha_lb)
      .def_readonly("gamma_ub", &BoundSet::gamma_ub);

  m.def("greedy_build", &greedy_build);
  m.def("greedy_build_dual", &greedy_build_dual);
  m.def("project_system", &project_system);
  m.def("offline_project", &offline_project);
  m.def("attach_dual", &attach_dual);
  m.def("solve_projected", &solve_projected);
  m.def("residual_norm", &residual_norm);
  m.def("error_bounds", &error_bounds);
  m.def("dual_weighted_residual", &dual_weighted_residual);
  m.def("output_bound_dual", &output_bound_dual);
  m.def("reduced_model_to_json", &reduced_model_to_json);
  m.def("reduced_model_from_json", &reduced_model_from_json);

  // ---- sampling ---------------------------------------------------------
  m.def("sample_parameter_box", &sample_parameter_box, py::arg("count"),
        py::arg("seed"), py::arg("log_uniform") = false);

  py::class_<SampleRow>(m, "SampleRow")
      .def_readonly("mu", &SampleRow::mu)
      .def_readonly("indicators", &SampleRow::indicators)
      .def_readonly("err_energy", &SampleRow::err_energy)
      .def_readonly("err_xnorm", &SampleRow::err_xnorm)
      .def_readonly("err_output_compliant", &SampleRow::err_output_compliant)
      .def_readonly("output_errors", &SampleRow::output_errors)
      .def_readonly("bounds", &SampleRow::bounds)
      .def_readonly("split", &SampleRow::split)
      .def_readonly("ok", &SampleRow::ok);

  py::class_<SampleTable>(m, "SampleTable")
      .def_readonly("indicator_columns", &SampleTable::indicator_columns)
      .def_readonly("output_ids", &SampleTable::output_ids)
      .def_readonly("rows", &SampleTable::rows);

  py::class_<CollectOptions>(m, "CollectOptions")
      .def(py::init([](int n_train, int threads) {
             return CollectOptions{n_train, threads};
           }),
           py::arg("n_train"), py::arg("threads") = 1)
      .def_readwrite("n_train", &CollectOptions::n_train)
      .def_readwrite("threads", &CollectOptions::threads);

  m.def("collect_samples", &collect_samples);
  m.def("table_to_csv", &table_to_csv);
  m.def("table_from_csv", &table_from_csv);

  // ---- regression -------------------------------------------------------
  py::class_<NormalPrediction>(m, "NormalPrediction")
      .def_readonly("mean", &NormalPrediction::mean)
      .def_readonly("var_mean", &NormalPrediction::var_mean)
      .def_readonly("noise_var", &NormalPrediction::noise_var)
      .def_readonly("extrapolated", &NormalPrediction::extrapolated)
      .def_property_readonly("total_var", &NormalPrediction::total_var);

  py::class_<TrainingSet>(m, "TrainingSet")
      .def(py::init([](Eigen::MatrixXd x, Eigen::VectorXd y) {
             return TrainingSet{std::move(x), std::move(y)};
           }),
           py::arg("x"), py::arg("y"))
      .def_readwrite("x", &TrainingSet::x)
      .def_readwrite("y", &TrainingSet::y);

  py::class_<GpConfig>(m, "GpConfig")
      .def(py::init<>())
      .def_readwrite("starts", &GpConfig::starts)
      .def_readwrite("max_iters", &GpConfig::max_iters)
      .def_readwrite("seed", &GpConfig::seed);

  py::class_<GPModel>(m, "GPModel")
      .def_readonly("l2", &GPModel::l2)
      .def_readonly("sigma2", &GPModel::sigma2)
      .def_readonly("y_offset", &GPModel::y_offset)
      .def_readonly("y_scale", &GPModel::y_scale)
      .def_readonly("log_likelihood", &GPModel::log_likelihood)
      .def("predict", &GPModel::predict);
  m.def("gp_train", &gp_train, py::arg("ts"), py::arg("config") = GpConfig{});
  m.def("gp_fit_fixed", &gp_fit_fixed);
  m.def("gp_to_json", &gp_to_json);
  m.def("gp_from_json", &gp_from_json);

  py::class_<RvmConfig>(m, "RvmConfig")
      .def(py::init<>())
      .def_readwrite("legendre_max_order", &RvmConfig::legendre_max_order)
      .def_readwrite("estimate_noise", &RvmConfig::estimate_noise)
      .def_readwrite("fixed_sigma2", &RvmConfig::fixed_sigma2)
      .def_readwrite("max_sweeps", &RvmConfig::max_sweeps);
  py::class_<RVMModel>(m, "RVMModel")
      .def_readonly("active", &RVMModel::active)
      .def_readonly("sigma2", &RVMModel::sigma2);
  m.def("rvm_train", &rvm_train, py::arg("ts"),
        py::arg("config") = RvmConfig{});
  m.def("rvm_predict", &rvm_predict);
  m.def("legendre_poly", &legendre_poly);

  // ---- statistics -------------------------------------------------------
  m.def("erf_inv", &erf_inv);
  m.def("normal_quantile", &normal_quantile);
  py::class_<StatSummary>(m, "StatSummary")
      .def_readonly("mean", &StatSummary::mean)
      .def_readonly("median", &StatSummary::median)
      .def_readonly("stddev", &StatSummary::stddev)
      .def_readonly("min", &StatSummary::min)
      .def_readonly("max", &StatSummary::max)
      .def_readonly("count", &StatSummary::count);
  m.def("summarize", &summarize);

  // ---- error surrogates -------------------------------------------------
  py::enum_<IndicatorKind>(m, "IndicatorKind")
      .value("LogResidualEuclid", IndicatorKind::LogResidualEuclid)
      .value("LogResidualRiesz", IndicatorKind::LogResidualRiesz)
      .value("LogEnergyBound", IndicatorKind::LogEnergyBound)
      .value("DualWeightedResidual", IndicatorKind::DualWeightedResidual)
      .value("SystemInputs", IndicatorKind::SystemInputs);
  py::enum_<Transform>(m, "Transform")
      .value("Log", Transform::Log)
      .value("Identity", Transform::Identity);
  py::enum_<ErrorKind>(m, "ErrorKind")
      .value("EnergyStateError", ErrorKind::EnergyStateError)
      .value("XStateError", ErrorKind::XStateError)
      .value("CompliantOutputError", ErrorKind::CompliantOutputError)
      .value("OutputError", ErrorKind::OutputError);
  py::enum_<VarianceMode>(m, "VarianceMode")
      .value("Full", VarianceMode::Full)
      .value("NoiseOnly", VarianceMode::NoiseOnly);
  py::enum_<RegressorKind>(m, "RegressorKind")
      .value("Gp", RegressorKind::Gp)
      .value("Rvm", RegressorKind::Rvm);

  py::class_<IndicatorSpec>(m, "IndicatorSpec")
      .def(py::init<>())
      .def_readwrite("kind", &IndicatorSpec::kind)
      .def_readwrite("dual_id", &IndicatorSpec::dual_id);
  py::class_<ErrorSpec>(m, "ErrorSpec")
      .def(py::init<>())
      .def_readwrite("kind", &ErrorSpec::kind)
      .def_readwrite("output_id", &ErrorSpec::output_id);
  py::class_<SurrogateSpec>(m, "SurrogateSpec")
      .def(py::init<>())
      .def_readwrite("indicator", &SurrogateSpec::indicator)
      .def_readwrite("transform", &SurrogateSpec::transform)
      .def_readwrite("error", &SurrogateSpec::error)
      .def_readwrite("variance", &SurrogateSpec::variance)
      .def_readwrite("regressor", &SurrogateSpec::regressor);

  py::class_<SurrogatePrediction>(m, "SurrogatePrediction")
      .def_readonly("mean", &SurrogatePrediction::mean)
      .def_readonly("var_mean", &SurrogatePrediction::var_mean)
      .def_readonly("noise_var", &SurrogatePrediction::noise_var)
      .def_property_readonly("used_var", &SurrogatePrediction::used_var)
      .def_property_readonly("back_mode", &SurrogatePrediction::back_mode)
      .def_property_readonly("back_median", &SurrogatePrediction::back_median);

  py::class_<ErrorSurrogate>(m, "ErrorSurrogate")
      .def_readonly("spec", &ErrorSurrogate::spec);

  py::class_<CoverageEntry>(m, "CoverageEntry")
      .def_readonly("omega", &CoverageEntry::omega)
      .def_readonly("observed_full", &CoverageEntry::observed_full)
      .def_readonly("observed_noise_only", &CoverageEntry::observed_noise_only);

  m.def("train_surrogate", &train_surrogate, py::arg("table"), py::arg("spec"),
        py::arg("n_train_use") = -1);
  m.def("predict_error", &predict_error);
  m.def("predict_row", &predict_row);
  m.def("rigor_shift_amount", &rigor_shift_amount);
  m.def("rigor_shift", &rigor_shift);
  m.def("validate_confidence", &validate_confidence);
  m.def("effectivities", &effectivities);
  m.def("expected_improvements", &expected_improvements);
  m.def("overestimation_frequency", &overestimation_frequency);
  m.def("uniform_baseline_improvements", &uniform_baseline_improvements);
  m.def("uniform_baseline_effectivities", &uniform_baseline_effectivities);
  m.def("rb_bound_effectivities", &rb_bound_effectivities);
  m.def("corrected_output", &corrected_output);
  m.def("surrogate_to_json", &surrogate_to_json);
  m.def("surrogate_from_json", &surrogate_from_json);

  // ---- experiment pipeline ----------------------------------------------
  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("mesh_divisions", &ExperimentConfig::mesh_divisions)
      .def_readwrite("greedy_candidates", &ExperimentConfig::greedy_candidates)
      .def_readwrite("greedy_tol", &ExperimentConfig::greedy_tol)
      .def_readwrite("greedy_max_p", &ExperimentConfig::greedy_max_p)
      .def_readwrite("greedy_seed", &ExperimentConfig::greedy_seed)
      .def_readwrite("sample_total", &ExperimentConfig::sample_total)
      .def_readwrite("sample_train", &ExperimentConfig::sample_train)
      .def_readwrite("sample_validation",
                     &ExperimentConfig::sample_validation)
      .def_readwrite("sample_seed", &ExperimentConfig::sample_seed)
      .def_readwrite("log_uniform_sampling",
                     &ExperimentConfig::log_uniform_sampling)
      .def_readwrite("threads", &ExperimentConfig::threads);
  m.def("config_from_json", &config_from_json);
  m.def("config_to_json", &config_to_json);
  m.def("config_hash", &config_hash);
  m.def("cmd_offline", &cmd_offline);
  m.def("cmd_sample", &cmd_sample);
  m.def("cmd_train_validate", &cmd_train_validate);
  m.def("cmd_report", &cmd_report);
}
