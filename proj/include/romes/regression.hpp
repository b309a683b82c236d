#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace romes {

struct TrainingSet {
  Eigen::MatrixXd x;  // N x q, already scaled
  Eigen::VectorXd y;  // transformed errors
};

/// Predictive normal in the transformed space. var_mean is the uncertainty
/// of the mean, noise_var the inferred noise; the full predictive variance
/// is their sum.
struct NormalPrediction {
  double mean = 0;
  double var_mean = 0;
  double noise_var = 0;
  bool extrapolated = false;
  double total_var() const { return var_mean + noise_var; }
};

// ---------------------------------------------------------------------------
// GP kernel method (squared-exponential kernel, zero prior mean on
// standardized targets, hyperparameters by marginal-likelihood maximization)
// ---------------------------------------------------------------------------

struct GpConfig {
  int starts = 5;
  int max_iters = 500;
  uint64_t seed = 0;
  double sigma2_floor = 1e-12;
};

struct GPModel {
  Eigen::MatrixXd x;
  Eigen::VectorXd y_std;  // standardized targets
  double y_offset = 0, y_scale = 1;
  double l2 = 1, sigma2 = 1e-12;  // hyperparameters in standardized space
  double log_likelihood = 0;
  // cached factorization state
  Eigen::MatrixXd chol_lower;  // L with L L' = K + sigma2 I (+ jitter)
  Eigen::VectorXd alpha;       // (K + sigma2 I)^-1 y_std
  double jitter = 0;

  NormalPrediction predict(const Eigen::VectorXd& xs) const;
};

GPModel gp_train(const TrainingSet& ts, const GpConfig& config = {});

/// GP conditioned on the data with hyperparameters fixed by the caller.
GPModel gp_fit_fixed(const TrainingSet& ts, double l2, double sigma2);

/// Marginal log-likelihood of the standardized data at (l2, sigma2).
double gp_log_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         double l2, double sigma2, double jitter = 0);

std::string gp_to_json(const GPModel& m);
GPModel gp_from_json(const std::string& text);

// ---------------------------------------------------------------------------
// Relevance vector machine (sparse Bayesian regression, evidence
// maximization with per-basis precisions; large precisions prune a basis)
// ---------------------------------------------------------------------------

enum class RvmBasisKind { Rbf, Legendre };

struct RvmConfig {
  RvmBasisKind basis = RvmBasisKind::Legendre;
  int legendre_max_order = 4;
  double rbf_width = 0;  // 0: median pairwise training distance
  double prune_threshold = 1e12;
  double tol = 1e-6;
  int max_sweeps = 1000;
  bool estimate_noise = true;
  double fixed_sigma2 = 0;  // used when estimate_noise is false
};

struct RVMModel {
  RvmConfig config;
  Eigen::MatrixXd centers;  // RBF centers (training inputs)
  double rbf_width = 0;
  Eigen::MatrixXd x;  // training inputs (for reference)
  double y_offset = 0, y_scale = 1;
  std::vector<int> active;  // indices into the full basis
  Eigen::VectorXd beta;     // precisions of the active bases
  double sigma2 = 0;        // noise variance, standardized space
  Eigen::VectorXd weight_mean;
  Eigen::MatrixXd weight_cov;

  /// Active basis functions evaluated at a scaled point.
  Eigen::VectorXd features(const Eigen::VectorXd& xs) const;
};

RVMModel rvm_train(const TrainingSet& ts, const RvmConfig& config = {});
NormalPrediction rvm_predict(const RVMModel& m, const Eigen::VectorXd& xs);

std::string rvm_to_json(const RVMModel& m);
RVMModel rvm_from_json(const std::string& text);

double legendre_poly(int order, double x);

}  // namespace romes
