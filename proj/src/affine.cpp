#include "romes/affine.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace romes {

void check_in_box(const InputPoint& mu) {
  for (int i = 0; i < 9; ++i) {
    if (!(mu[i] > 0)) {
      throw std::invalid_argument("parameter components must be positive");
    }
    if (mu[i] < kParamLo - 1e-12 || mu[i] > kParamHi + 1e-12) {
      throw std::invalid_argument("parameter outside the box [0.1, 10]^9");
    }
  }
}

AffineOperator assemble_affine_components(const TriangularMesh& mesh) {
  const int n = mesh.n_dofs();
  AffineOperator op;
  op.n = n;

  std::vector<std::vector<Eigen::Triplet<double>>> trips(kNumBlocks);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const auto& p0 = mesh.nodes[tri[0]];
    const auto& p1 = mesh.nodes[tri[1]];
    const auto& p2 = mesh.nodes[tri[2]];
    const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) -
                       (p2[0] - p0[0]) * (p1[1] - p0[1]);
    const double area = 0.5 * std::abs(det);
    if (area < 1e-14) {
      throw std::runtime_error("degenerate triangle in assembly");
    }
    // P1 shape-function gradients: grad phi_i = (b_i, c_i) / det
    const double b[3] = {p1[1] - p2[1], p2[1] - p0[1], p0[1] - p1[1]};
    const double c[3] = {p2[0] - p1[0], p0[0] - p2[0], p1[0] - p0[0]};
    const int q = mesh.block_of_triangle[t] - 1;
    for (int i = 0; i < 3; ++i) {
      const int di = mesh.dof_of_node[tri[i]];
      if (di < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int dj = mesh.dof_of_node[tri[j]];
        if (dj < 0) continue;
        const double kij = (b[i] * b[j] + c[i] * c[j]) / (4.0 * area);
        trips[q].emplace_back(di, dj, kij);
      }
    }
  }
  op.components.resize(kNumBlocks);
  for (int q = 0; q < kNumBlocks; ++q) {
    op.components[q].resize(n, n);
    op.components[q].setFromTriplets(trips[q].begin(), trips[q].end());
    op.components[q].makeCompressed();
  }

  op.rhs = Eigen::VectorXd::Zero(n);
  for (const auto& edge : mesh.neumann_bottom_edges) {
    const auto& pa = mesh.nodes[edge[0]];
    const auto& pb = mesh.nodes[edge[1]];
    const double len = std::hypot(pb[0] - pa[0], pb[1] - pa[1]);
    for (int k = 0; k < 2; ++k) {
      const int dof = mesh.dof_of_node[edge[k]];
      if (dof >= 0) op.rhs[dof] += 0.5 * len;
    }
  }

  op.inner_product = op.components[0];
  for (int q = 1; q < kNumBlocks; ++q) op.inner_product += op.components[q];
  op.inner_product.makeCompressed();

  op.output_vectors["compliant"] = op.rhs;
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(n);
  e1[nearest_free_dof(mesh, 1.0 / 3.0, 1.0 / 3.0)] = 1.0;
  op.output_vectors["point_1"] = e1;
  Eigen::VectorXd e2 = Eigen::VectorXd::Zero(n);
  e2[nearest_free_dof(mesh, 2.0 / 3.0, 2.0 / 3.0)] = 1.0;
  op.output_vectors["point_2"] = e2;
  return op;
}

SpMat assemble_full(const AffineOperator& op, const InputPoint& mu) {
  check_in_box(mu);
  SpMat a = mu[0] * op.components[0];
  for (int q = 1; q < kNumBlocks; ++q) a += mu[q] * op.components[q];
  a.makeCompressed();
  return a;
}

Eigen::VectorXd solve_hifi(const AffineOperator& op, const InputPoint& mu) {
  const SpMat a = assemble_full(op, mu);
  Eigen::SimplicialLLT<SpMat> llt(a);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("sparse Cholesky factorization failed");
  }
  Eigen::VectorXd u = llt.solve(op.rhs);
  const double res = (a * u - op.rhs).norm();
  if (!(res <= 1e-10 * op.rhs.norm())) {
    // direct solve should be exact to round-off; one refinement pass
    u += llt.solve(op.rhs - a * u);
    const double res2 = (a * u - op.rhs).norm();
    if (!(res2 <= 1e-10 * op.rhs.norm())) {
      throw std::runtime_error("high-fidelity solve did not converge");
    }
  }
  return u;
}

double compliant_output(const AffineOperator& op, const Eigen::VectorXd& u) {
  if (u.size() != op.rhs.size()) {
    throw std::invalid_argument("state dimension mismatch");
  }
  return op.rhs.dot(u);
}

double point_output(const Eigen::VectorXd& u, int dof) {
  if (dof < 0 || dof >= u.size()) {
    throw std::invalid_argument("point output node is not a free dof");
  }
  return u[dof];
}

static double quadratic_norm(const SpMat& m, const Eigen::VectorXd& v) {
  const double q = v.dot(m * v);
  if (q < -1e-10 * std::max(1.0, v.squaredNorm())) {
    throw std::runtime_error("negative radicand: matrix not SPD");
  }
  return std::sqrt(std::max(q, 0.0));
}

double energy_norm(const AffineOperator& op, const InputPoint& mu,
                   const Eigen::VectorXd& v) {
  return quadratic_norm(assemble_full(op, mu), v);
}

double x_norm(const AffineOperator& op, const Eigen::VectorXd& v) {
  return quadratic_norm(op.inner_product, v);
}

double coercivity_lower_bound(const InputPoint& mu) { return mu.minCoeff(); }
double continuity_upper_bound(const InputPoint& mu) { return mu.maxCoeff(); }

std::string export_json(const TriangularMesh& mesh,
                        const AffineOperator& op) {
  nlohmann::json j;
  j["schema_version"] = 1;
  auto& jn = j["mesh"]["nodes"] = nlohmann::json::array();
  for (const auto& p : mesh.nodes) jn.push_back({p[0], p[1]});
  auto& jt = j["mesh"]["triangles"] = nlohmann::json::array();
  for (const auto& t : mesh.triangles) jt.push_back({t[0], t[1], t[2]});
  j["mesh"]["block_of_triangle"] = mesh.block_of_triangle;
  j["mesh"]["dof_of_node"] = mesh.dof_of_node;
  j["operator"]["n"] = op.n;
  auto sparse_to_json = [](const SpMat& m) {
    nlohmann::json s;
    std::vector<int> rows, cols;
    std::vector<double> vals;
    for (int k = 0; k < m.outerSize(); ++k) {
      for (SpMat::InnerIterator it(m, k); it; ++it) {
        rows.push_back(static_cast<int>(it.row()));
        cols.push_back(static_cast<int>(it.col()));
        vals.push_back(it.value());
      }
    }
    s["rows"] = rows;
    s["cols"] = cols;
    s["values"] = vals;
    return s;
  };
  for (int q = 0; q < kNumBlocks; ++q) {
    j["operator"]["components"].push_back(sparse_to_json(op.components[q]));
  }
  j["operator"]["rhs"] =
      std::vector<double>(op.rhs.data(), op.rhs.data() + op.rhs.size());
  for (const auto& [name, vec] : op.output_vectors) {
    j["operator"]["output_vectors"][name] =
        std::vector<double>(vec.data(), vec.data() + vec.size());
  }
  return j.dump();
}

}  // namespace romes
