#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "romes/affine.hpp"

namespace romes {

struct ReducedBasis {
  Eigen::MatrixXd V;  // n x p, columns K-orthonormal
  std::vector<InputPoint> snapshot_inputs;
  int p() const { return static_cast<int>(V.cols()); }
};

enum class Weighting { Riesz, Euclid };

/// Parameter-independent blocks of the quadratic residual-norm expansion
///   r(mu)^2 = sum_qq' mu_q mu_q' uhat' AA[q][q'] uhat
///           - 2 sum_q' mu_q' bA[q'] uhat + bb
/// for the residual A(mu) V uhat - b, weighted by M^-1 with M = K (Riesz)
/// or M = I (Euclidean).
struct ResidualGramians {
  std::vector<std::vector<Eigen::MatrixXd>> AA;  // [q][q'], p x p
  std::vector<Eigen::RowVectorXd> bA;            // [q'], 1 x p
  double bb = 0.0;
};

/// Projected operators and Gramians for one linear problem A(mu) x = b.
struct ProjectedSystem {
  ReducedBasis basis;
  std::vector<Eigen::MatrixXd> reduced_A;  // V' A^q V
  Eigen::VectorXd reduced_b;               // V' b
  ResidualGramians riesz;
  ResidualGramians euclid;
};

/// Dual problem for one output g: A(mu) y = -g, plus the cross blocks
/// needed to evaluate dual-weighted residuals online.
struct DualModel {
  ProjectedSystem system;                 // with b = -g
  std::vector<Eigen::MatrixXd> cross_A;   // V_y' A^q V, p_y x p
  Eigen::VectorXd cross_f;                // V_y' f
  std::string output_id;
};

struct ReducedModel {
  ProjectedSystem primal;  // b = f
  std::map<std::string, DualModel> duals;
  uint64_t greedy_seed = 0;
  int n = 0;
};

struct ReducedState {
  Eigen::VectorXd uhat;
  InputPoint mu;
};

struct BoundSet {
  double energy_ub = 0, energy_lb = 0;  // Delta_u^mu and lower counterpart
  double x_ub = 0, x_lb = 0;            // Delta_u
  double output_ub = 0, output_lb = 0;  // Delta_s (compliant)
  double residual_riesz = 0;
  double residual_euclid = 0;
  double alpha_lb = 0, gamma_ub = 0;
};

struct GreedyOptions {
  double tol = 1.0;
  int max_p = 200;
  uint64_t seed = 0;
};

struct GreedyResult {
  ReducedBasis basis;
  std::vector<double> max_bound_history;  // max candidate bound per iteration
  int skipped_dependent = 0;
};

/// Greedy basis construction for A(mu) x = b driven by the energy-norm
/// bound r_riesz / sqrt(alpha_LB) over the candidate set. The first point
/// is drawn uniformly from the candidates with the given seed.
GreedyResult greedy_build_system(const AffineOperator& op,
                                 const Eigen::VectorXd& b,
                                 const std::vector<InputPoint>& candidates,
                                 const GreedyOptions& opts);

inline GreedyResult greedy_build(const AffineOperator& op,
                                 const std::vector<InputPoint>& candidates,
                                 const GreedyOptions& opts) {
  return greedy_build_system(op, op.rhs, candidates, opts);
}

GreedyResult greedy_build_dual(const AffineOperator& op,
                               const std::string& output_id,
                               const std::vector<InputPoint>& candidates,
                               const GreedyOptions& opts);

ProjectedSystem project_system(const AffineOperator& op,
                               const Eigen::VectorXd& b,
                               const ReducedBasis& basis);

ReducedModel offline_project(const AffineOperator& op,
                             const ReducedBasis& basis);

void attach_dual(ReducedModel& rm, const AffineOperator& op,
                 const std::string& dual_id, const std::string& output_id,
                 const ReducedBasis& dual_basis);

Eigen::VectorXd solve_projected(const ProjectedSystem& sys,
                                const InputPoint& mu);

ReducedState solve_reduced(const ReducedModel& rm, const InputPoint& mu);

double residual_norm(const ProjectedSystem& sys, const InputPoint& mu,
                     const Eigen::VectorXd& uhat, Weighting w);

BoundSet error_bounds(const ReducedModel& rm, const InputPoint& mu,
                      const Eigen::VectorXd& uhat);

/// rho = y_red' r(V uhat; mu), evaluated without n-dimensional work.
double dual_weighted_residual(const ReducedModel& rm,
                              const std::string& dual_id,
                              const InputPoint& mu);

/// Delta_s = r(mu) r_g(mu) / alpha_LB(mu) >= |delta_s(mu)| (Riesz norms).
double output_bound_dual(const ReducedModel& rm, const std::string& dual_id,
                         const InputPoint& mu);

std::string reduced_model_to_json(const ReducedModel& rm);
ReducedModel reduced_model_from_json(const std::string& text);

}  // namespace romes
