#include "romes/surrogate.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace romes {

std::string IndicatorSpec::column() const {
  switch (kind) {
    case IndicatorKind::LogResidualEuclid:
      return "log_res_euclid";
    case IndicatorKind::LogResidualRiesz:
      return "log_res_riesz";
    case IndicatorKind::LogEnergyBound:
      return "log_bound_energy";
    case IndicatorKind::DualWeightedResidual:
      return "dwr_" + dual_id;
    case IndicatorKind::SystemInputs:
      break;
  }
  throw std::logic_error("system-input indicators have no scalar column");
}

double SurrogatePrediction::back_mode() const {
  return transform == Transform::Log ? std::exp(mean - used_var()) : mean;
}

double SurrogatePrediction::back_median() const {
  return transform == Transform::Log ? std::exp(mean) : mean;
}

Eigen::VectorXd indicator_features(const SampleTable&, const SampleRow& row,
                                   const IndicatorSpec& spec) {
  if (spec.kind == IndicatorKind::SystemInputs) {
    return row.mu;
  }
  Eigen::VectorXd rho(1);
  rho[0] = row.indicators.at(spec.column());
  return rho;
}

double true_error(const SampleRow& row, const ErrorSpec& spec) {
  switch (spec.kind) {
    case ErrorKind::EnergyStateError:
      return row.err_energy;
    case ErrorKind::XStateError:
      return row.err_xnorm;
    case ErrorKind::CompliantOutputError:
      return row.err_output_compliant;
    case ErrorKind::OutputError:
      return row.output_errors.at(spec.output_id);
  }
  throw std::logic_error("unreachable");
}

namespace {

constexpr double kZeroErrorFloor = 1e-14;

double transform_value(Transform t, double delta) {
  return t == Transform::Log ? std::log(delta) : delta;
}

/// Rows usable as regression data for the spec: valid rows, and under the
/// Log transformation rows with error above the zero floor (snapshot rows
/// reproduce exactly and carry no information about the error law).
bool row_usable(const SampleRow& row, const SurrogateSpec& spec) {
  if (!row.ok) return false;
  if (spec.transform == Transform::Log) {
    return true_error(row, spec.error) > kZeroErrorFloor;
  }
  return true;
}

NormalPrediction model_predict(const ErrorSurrogate& s,
                               const Eigen::VectorXd& scaled) {
  if (std::holds_alternative<GPModel>(s.model)) {
    return std::get<GPModel>(s.model).predict(scaled);
  }
  return rvm_predict(std::get<RVMModel>(s.model), scaled);
}

SurrogatePrediction shifted_row_prediction(const ErrorSurrogate& s,
                                           const SampleTable& table,
                                           const SampleRow& row, double c) {
  return rigor_shift(predict_row(s, table, row), c);
}

}  // namespace

ErrorSurrogate train_surrogate(const SampleTable& table,
                               const SurrogateSpec& spec, int n_train_use) {
  std::vector<const SampleRow*> rows;
  std::vector<int> negative_rows;
  int seen = 0;
  for (const SampleRow& row : table.rows) {
    if (row.split != "train") continue;
    ++seen;
    if (n_train_use > 0 && seen > n_train_use) break;
    if (!row.ok) continue;
    if (spec.transform == Transform::Log &&
        true_error(row, spec.error) < 0) {
      negative_rows.push_back(seen - 1);
      continue;
    }
    if (row_usable(row, spec)) rows.push_back(&row);
  }
  if (!negative_rows.empty()) {
    std::ostringstream msg;
    msg << "log transformation needs positive errors; negative at train rows";
    for (int i : negative_rows) msg << ' ' << i;
    throw std::invalid_argument(msg.str());
  }
  if (rows.size() < 2) {
    throw std::invalid_argument("not enough usable training rows");
  }

  const int q = spec.indicator.dim();
  Eigen::MatrixXd x(rows.size(), q);
  Eigen::VectorXd y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    x.row(i) = indicator_features(table, *rows[i], spec.indicator).transpose();
    y[i] = transform_value(spec.transform, true_error(*rows[i], spec.error));
  }

  ErrorSurrogate s;
  s.spec = spec;
  s.scaling = FeatureScaling::fit(x);
  TrainingSet ts{s.scaling.apply(x), y};
  if (spec.regressor == RegressorKind::Gp) {
    s.model = gp_train(ts, spec.gp);
  } else {
    s.model = rvm_train(ts, spec.rvm);
  }
  return s;
}

SurrogatePrediction predict_error(const ErrorSurrogate& s,
                                  const Eigen::VectorXd& rho) {
  const NormalPrediction np = model_predict(s, s.scaling.apply_point(rho));
  SurrogatePrediction p;
  p.mean = np.mean;
  p.var_mean = np.var_mean;
  p.noise_var = np.noise_var;
  p.variance = s.spec.variance;
  p.transform = s.spec.transform;
  return p;
}

SurrogatePrediction predict_row(const ErrorSurrogate& s,
                                const SampleTable& table,
                                const SampleRow& row) {
  return predict_error(s, indicator_features(table, row, s.spec.indicator));
}

double rigor_shift_amount(double sigma_bar, double c) {
  if (!(c > 0.0 && c < 1.0)) {
    throw std::invalid_argument("rigor level must lie in (0, 1)");
  }
  return std::sqrt(2.0) * sigma_bar * erf_inv(2.0 * c - 1.0);
}

SurrogatePrediction rigor_shift(const SurrogatePrediction& p, double c) {
  SurrogatePrediction out = p;
  out.mean += rigor_shift_amount(std::sqrt(p.used_var()), c);
  return out;
}

std::vector<CoverageEntry> validate_confidence(
    const ErrorSurrogate& s, const SampleTable& table,
    const std::vector<double>& omegas) {
  const auto rows = table.split_rows("validation");
  std::vector<CoverageEntry> entries;
  for (double omega : omegas) {
    CoverageEntry e;
    e.omega = omega;
    const double z = omega > 0 ? normal_quantile(0.5 + 0.5 * omega) : 0.0;
    int count = 0, in_full = 0, in_noise = 0;
    for (const SampleRow* row : rows) {
      if (!row_usable(*row, s.spec)) continue;
      const double target =
          transform_value(s.spec.transform, true_error(*row, s.spec.error));
      const SurrogatePrediction p = predict_row(s, table, *row);
      ++count;
      if (std::abs(target - p.mean) <=
          z * std::sqrt(p.var_mean + p.noise_var)) {
        ++in_full;
      }
      if (std::abs(target - p.mean) <= z * std::sqrt(p.noise_var)) {
        ++in_noise;
      }
    }
    if (count > 0) {
      e.observed_full = static_cast<double>(in_full) / count;
      e.observed_noise_only = static_cast<double>(in_noise) / count;
    }
    entries.push_back(e);
  }
  return entries;
}

DeviationSamples deviation_samples(const ErrorSurrogate& s,
                                   const SampleTable& table) {
  DeviationSamples d;
  for (const SampleRow* row : table.split_rows("validation")) {
    if (!row_usable(*row, s.spec)) continue;
    const SurrogatePrediction p = predict_row(s, table, *row);
    d.values.push_back(
        transform_value(s.spec.transform, true_error(*row, s.spec.error)) -
        p.mean);
    d.noise_var = p.noise_var;
  }
  return d;
}

std::vector<double> effectivities(const ErrorSurrogate& s,
                                  const SampleTable& table, double c) {
  std::vector<double> out;
  for (const SampleRow* row : table.split_rows("validation")) {
    if (!row->ok) continue;
    const double delta = true_error(*row, s.spec.error);
    if (!(delta > kZeroErrorFloor)) continue;
    out.push_back(shifted_row_prediction(s, table, *row, c).back_mode() /
                  delta);
  }
  return out;
}

std::vector<double> expected_improvements(const ErrorSurrogate& s,
                                          const SampleTable& table) {
  std::vector<double> out;
  for (const SampleRow* row : table.split_rows("validation")) {
    if (!row->ok) continue;
    const double delta = true_error(*row, s.spec.error);
    if (delta == 0) continue;
    if (s.spec.transform == Transform::Log && delta <= kZeroErrorFloor) {
      continue;
    }
    const double mode = predict_row(s, table, *row).back_mode();
    out.push_back(std::abs((delta - mode) / delta));
  }
  return out;
}

double overestimation_frequency(const ErrorSurrogate& s,
                                const SampleTable& table, double c) {
  int count = 0, over = 0;
  for (const SampleRow* row : table.split_rows("validation")) {
    if (!row_usable(*row, s.spec)) continue;
    const double target =
        transform_value(s.spec.transform, true_error(*row, s.spec.error));
    // median of the shifted normal in transformed space is its mean
    const SurrogatePrediction p = shifted_row_prediction(s, table, *row, c);
    ++count;
    if (p.mean > target) ++over;
  }
  return count > 0 ? static_cast<double>(over) / count : 0.0;
}

UniformBaseline uniform_baseline(double lower, double upper) {
  if (lower > upper) {
    throw std::invalid_argument("inverted baseline interval");
  }
  return UniformBaseline{lower, upper};
}

std::vector<double> uniform_baseline_improvements(const SampleTable& table) {
  std::vector<double> out;
  for (const SampleRow* row : table.split_rows("validation")) {
    if (!row->ok || row->err_output_compliant == 0) continue;
    const double mid =
        uniform_baseline(row->bounds.output_lb, row->bounds.output_ub)
            .midpoint();
    out.push_back(std::abs((row->err_output_compliant - mid) /
                           row->err_output_compliant));
  }
  return out;
}

std::vector<double> uniform_baseline_effectivities(const SampleTable& table) {
  std::vector<double> out;
  for (const SampleRow* row : table.split_rows("validation")) {
    if (!row->ok || !(row->err_output_compliant > kZeroErrorFloor)) continue;
    const double mid =
        uniform_baseline(row->bounds.output_lb, row->bounds.output_ub)
            .midpoint();
    out.push_back(mid / row->err_output_compliant);
  }
  return out;
}

std::vector<double> rb_bound_effectivities(const SampleTable& table) {
  std::vector<double> out;
  for (const SampleRow* row : table.split_rows("validation")) {
    if (!row->ok || !(row->err_energy > kZeroErrorFloor)) continue;
    out.push_back(row->bounds.energy_ub / row->err_energy);
  }
  return out;
}

double corrected_output(double reduced_output, const ErrorSurrogate& s,
                        const Eigen::VectorXd& rho) {
  return reduced_output + predict_error(s, rho).back_mode();
}

namespace {

nlohmann::json spec_to_json(const SurrogateSpec& spec) {
  static const std::map<IndicatorKind, std::string> kind_names = {
      {IndicatorKind::LogResidualEuclid, "log_res_euclid"},
      {IndicatorKind::LogResidualRiesz, "log_res_riesz"},
      {IndicatorKind::LogEnergyBound, "log_bound_energy"},
      {IndicatorKind::DualWeightedResidual, "dual_weighted_residual"},
      {IndicatorKind::SystemInputs, "system_inputs"},
  };
  static const std::map<ErrorKind, std::string> error_names = {
      {ErrorKind::EnergyStateError, "energy_state"},
      {ErrorKind::XStateError, "x_state"},
      {ErrorKind::CompliantOutputError, "compliant_output"},
      {ErrorKind::OutputError, "output"},
  };
  nlohmann::json j;
  j["indicator"] = kind_names.at(spec.indicator.kind);
  j["dual_id"] = spec.indicator.dual_id;
  j["transform"] = spec.transform == Transform::Log ? "log" : "identity";
  j["error"] = error_names.at(spec.error.kind);
  j["output_id"] = spec.error.output_id;
  j["variance"] =
      spec.variance == VarianceMode::Full ? "full" : "noise_only";
  j["regressor"] = spec.regressor == RegressorKind::Gp ? "gp" : "rvm";
  return j;
}

SurrogateSpec spec_from_json(const nlohmann::json& j) {
  static const std::map<std::string, IndicatorKind> kinds = {
      {"log_res_euclid", IndicatorKind::LogResidualEuclid},
      {"log_res_riesz", IndicatorKind::LogResidualRiesz},
      {"log_bound_energy", IndicatorKind::LogEnergyBound},
      {"dual_weighted_residual", IndicatorKind::DualWeightedResidual},
      {"system_inputs", IndicatorKind::SystemInputs},
  };
  static const std::map<std::string, ErrorKind> errors = {
      {"energy_state", ErrorKind::EnergyStateError},
      {"x_state", ErrorKind::XStateError},
      {"compliant_output", ErrorKind::CompliantOutputError},
      {"output", ErrorKind::OutputError},
  };
  SurrogateSpec spec;
  spec.indicator.kind = kinds.at(j.at("indicator").get<std::string>());
  spec.indicator.dual_id = j.at("dual_id").get<std::string>();
  spec.transform = j.at("transform").get<std::string>() == "log"
                       ? Transform::Log
                       : Transform::Identity;
  spec.error.kind = errors.at(j.at("error").get<std::string>());
  spec.error.output_id = j.at("output_id").get<std::string>();
  spec.variance = j.at("variance").get<std::string>() == "full"
                      ? VarianceMode::Full
                      : VarianceMode::NoiseOnly;
  spec.regressor = j.at("regressor").get<std::string>() == "gp"
                       ? RegressorKind::Gp
                       : RegressorKind::Rvm;
  return spec;
}

}  // namespace

std::string surrogate_to_json(const ErrorSurrogate& s) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["spec"] = spec_to_json(s.spec);
  j["scaling"]["center"] = std::vector<double>(
      s.scaling.center.data(),
      s.scaling.center.data() + s.scaling.center.size());
  j["scaling"]["half_span"] = std::vector<double>(
      s.scaling.half_span.data(),
      s.scaling.half_span.data() + s.scaling.half_span.size());
  if (std::holds_alternative<GPModel>(s.model)) {
    j["model"] = nlohmann::json::parse(gp_to_json(std::get<GPModel>(s.model)));
  } else {
    j["model"] =
        nlohmann::json::parse(rvm_to_json(std::get<RVMModel>(s.model)));
  }
  return j.dump();
}

ErrorSurrogate surrogate_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (j.at("schema_version").get<int>() != 1) {
    throw std::runtime_error("unsupported surrogate schema version");
  }
  ErrorSurrogate s;
  s.spec = spec_from_json(j.at("spec"));
  const auto center = j.at("scaling").at("center").get<std::vector<double>>();
  const auto span =
      j.at("scaling").at("half_span").get<std::vector<double>>();
  s.scaling.center = Eigen::Map<const Eigen::VectorXd>(
      center.data(), static_cast<Eigen::Index>(center.size()));
  s.scaling.half_span = Eigen::Map<const Eigen::VectorXd>(
      span.data(), static_cast<Eigen::Index>(span.size()));
  const std::string model_text = j.at("model").dump();
  if (j.at("model").at("kind").get<std::string>() == "gp") {
    s.model = gp_from_json(model_text);
  } else {
    s.model = rvm_from_json(model_text);
  }
  return s;
}

}  // namespace romes
