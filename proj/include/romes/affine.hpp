#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <map>
#include <string>
#include <vector>

#include "romes/mesh.hpp"

namespace romes {

using SpMat = Eigen::SparseMatrix<double>;
using InputPoint = Eigen::Matrix<double, 9, 1>;

constexpr int kNumBlocks = 9;
constexpr double kParamLo = 0.1;
constexpr double kParamHi = 10.0;

/// Throws std::invalid_argument if mu is outside [0.1, 10]^9.
void check_in_box(const InputPoint& mu);

/// Affine decomposition A(mu) = sum_q mu_q A^q of the thermal-block
/// stiffness matrix, restricted to the free dofs. The inner-product matrix
/// is K = A(1,...,1), so the coercivity/continuity constants of A(mu)
/// relative to K are exactly min_i mu_i and max_i mu_i.
struct AffineOperator {
  std::vector<SpMat> components;  // Q_a = 9 sparse SPSD matrices
  Eigen::VectorXd rhs;            // load from the unit bottom flux
  SpMat inner_product;            // K
  std::map<std::string, Eigen::VectorXd> output_vectors;
  int n = 0;
};

AffineOperator assemble_affine_components(const TriangularMesh& mesh);

SpMat assemble_full(const AffineOperator& op, const InputPoint& mu);

Eigen::VectorXd solve_hifi(const AffineOperator& op, const InputPoint& mu);

double compliant_output(const AffineOperator& op, const Eigen::VectorXd& u);
double point_output(const Eigen::VectorXd& u, int dof);

double energy_norm(const AffineOperator& op, const InputPoint& mu,
                   const Eigen::VectorXd& v);
double x_norm(const AffineOperator& op, const Eigen::VectorXd& v);

double coercivity_lower_bound(const InputPoint& mu);
double continuity_upper_bound(const InputPoint& mu);

/// JSON export of mesh and operator (coordinate lists, CSR triplets).
std::string export_json(const TriangularMesh& mesh, const AffineOperator& op);

}  // namespace romes
