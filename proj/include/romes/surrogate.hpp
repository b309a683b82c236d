#pragma once

#include <optional>
#include <variant>

#include "romes/regression.hpp"
#include "romes/sample.hpp"
#include "romes/scaling.hpp"
#include "romes/stats.hpp"

namespace romes {

enum class IndicatorKind {
  LogResidualEuclid,
  LogResidualRiesz,
  LogEnergyBound,
  DualWeightedResidual,
  SystemInputs,
};

struct IndicatorSpec {
  IndicatorKind kind = IndicatorKind::LogResidualEuclid;
  std::string dual_id;  // for DualWeightedResidual
  int dim() const { return kind == IndicatorKind::SystemInputs ? 9 : 1; }
  std::string column() const;  // scalar indicators only
};

enum class Transform { Log, Identity };

enum class ErrorKind {
  EnergyStateError,
  XStateError,
  CompliantOutputError,
  OutputError,
};

struct ErrorSpec {
  ErrorKind kind = ErrorKind::EnergyStateError;
  std::string output_id;  // for OutputError
};

enum class VarianceMode { Full, NoiseOnly };
enum class RegressorKind { Gp, Rvm };

struct SurrogateSpec {
  IndicatorSpec indicator;
  Transform transform = Transform::Log;
  ErrorSpec error;
  VarianceMode variance = VarianceMode::NoiseOnly;
  RegressorKind regressor = RegressorKind::Gp;
  GpConfig gp;
  RvmConfig rvm;
};

struct ErrorSurrogate {
  SurrogateSpec spec;
  FeatureScaling scaling;
  std::variant<GPModel, RVMModel> model;
};

/// Prediction in the transformed space plus the back-transformed summary.
struct SurrogatePrediction {
  double mean = 0;       // nu (possibly rigor-shifted)
  double var_mean = 0;   // Sigma
  double noise_var = 0;  // sigma^2
  VarianceMode variance = VarianceMode::NoiseOnly;
  Transform transform = Transform::Log;

  double used_var() const {
    return variance == VarianceMode::Full ? var_mean + noise_var : noise_var;
  }
  /// Mode of the back-transformed law: exp(nu - var) for Log, nu otherwise.
  double back_mode() const;
  /// Median of the back-transformed law.
  double back_median() const;
};

Eigen::VectorXd indicator_features(const SampleTable& table,
                                   const SampleRow& row,
                                   const IndicatorSpec& spec);
double true_error(const SampleRow& row, const ErrorSpec& spec);

ErrorSurrogate train_surrogate(const SampleTable& table,
                               const SurrogateSpec& spec,
                               int n_train_use = -1);

SurrogatePrediction predict_error(const ErrorSurrogate& s,
                                  const Eigen::VectorXd& rho);
SurrogatePrediction predict_row(const ErrorSurrogate& s,
                                const SampleTable& table,
                                const SampleRow& row);

/// Mean shift sqrt(2) sigma_bar erfinv(2c-1) giving overestimation
/// probability c; c = 0.5 leaves the prediction unchanged.
double rigor_shift_amount(double sigma_bar, double c);
SurrogatePrediction rigor_shift(const SurrogatePrediction& p, double c);

struct CoverageEntry {
  double omega = 0;
  double observed_full = 0;
  double observed_noise_only = 0;
};

std::vector<CoverageEntry> validate_confidence(const ErrorSurrogate& s,
                                               const SampleTable& table,
                                               const std::vector<double>& omegas);

/// D(mu) = d(delta) - nu over the validation split; the inferred noise
/// variance is returned alongside for histogram overlays.
struct DeviationSamples {
  std::vector<double> values;
  double noise_var = 0;
};
DeviationSamples deviation_samples(const ErrorSurrogate& s,
                                   const SampleTable& table);

/// mode of the c-shifted back-transformed surrogate / true error; rows with
/// nonpositive true error are skipped.
std::vector<double> effectivities(const ErrorSurrogate& s,
                                  const SampleTable& table, double c);

/// I = |(delta - mode)/delta| over validation rows with nonzero error.
std::vector<double> expected_improvements(const ErrorSurrogate& s,
                                          const SampleTable& table);

double overestimation_frequency(const ErrorSurrogate& s,
                                const SampleTable& table, double c);

/// Uniform distribution on [lower, upper]; the midpoint is used as point
/// summary for effectivity/improvement comparisons.
struct UniformBaseline {
  double lower = 0, upper = 0;
  double midpoint() const { return 0.5 * (lower + upper); }
};
UniformBaseline uniform_baseline(double lower, double upper);

std::vector<double> uniform_baseline_improvements(const SampleTable& table);
std::vector<double> uniform_baseline_effectivities(const SampleTable& table);
std::vector<double> rb_bound_effectivities(const SampleTable& table);

double corrected_output(double reduced_output, const ErrorSurrogate& s,
                        const Eigen::VectorXd& rho);

std::string surrogate_to_json(const ErrorSurrogate& s);
ErrorSurrogate surrogate_from_json(const std::string& text);

}  // namespace romes
