#include "romes/mesh.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace romes {

TriangularMesh build_mesh(int divisions_per_side) {
  if (divisions_per_side < 3 || divisions_per_side % 3 != 0) {
    throw std::invalid_argument(
        "divisions_per_side must be >= 3 and divisible by 3 so block "
        "boundaries align with element edges");
  }
  const int d = divisions_per_side;
  const double h = 1.0 / d;

  TriangularMesh mesh;
  mesh.divisions = d;
  mesh.nodes.reserve((d + 1) * (d + 1));
  for (int j = 0; j <= d; ++j) {
    for (int i = 0; i <= d; ++i) {
      mesh.nodes.push_back({i * h, j * h});
    }
  }
  auto node_id = [d](int i, int j) { return j * (d + 1) + i; };

  const int cells_per_block = d / 3;
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) {
      const int a = node_id(i, j);
      const int b = node_id(i + 1, j);
      const int c = node_id(i + 1, j + 1);
      const int e = node_id(i, j + 1);
      // alternate the diagonal per cell so the mesh has no global bias
      if ((i + j) % 2 == 0) {
        mesh.triangles.push_back({a, b, c});
        mesh.triangles.push_back({a, c, e});
      } else {
        mesh.triangles.push_back({a, b, e});
        mesh.triangles.push_back({b, c, e});
      }
      const int block =
          (j / cells_per_block) * 3 + (i / cells_per_block) + 1;
      mesh.block_of_triangle.push_back(block);
      mesh.block_of_triangle.push_back(block);
    }
  }

  for (int i = 0; i < d; ++i) {
    mesh.neumann_bottom_edges.push_back({node_id(i, 0), node_id(i + 1, 0)});
  }

  mesh.dof_of_node.assign(mesh.nodes.size(), -1);
  for (int id = 0; id < mesh.n_nodes(); ++id) {
    if (mesh.nodes[id][1] < 1.0 - 0.5 * h) {  // Dirichlet nodes sit on y=1
      mesh.dof_of_node[id] = static_cast<int>(mesh.node_of_dof.size());
      mesh.node_of_dof.push_back(id);
    }
  }
  return mesh;
}

int nearest_free_dof(const TriangularMesh& mesh, double x, double y) {
  int best = -1;
  double best_d2 = std::numeric_limits<double>::max();
  for (int dof = 0; dof < mesh.n_dofs(); ++dof) {
    const auto& p = mesh.nodes[mesh.node_of_dof[dof]];
    const double dx = p[0] - x, dy = p[1] - y;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = dof;
    }
  }
  return best;
}

}  // namespace romes
