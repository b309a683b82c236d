#pragma once

#include <array>
#include <vector>

namespace romes {

/// Structured triangulation of the unit square for the 3x3 thermal-block
/// problem. The square is split into divisions x divisions cells, each cell
/// into two triangles with alternating diagonal direction so that the mesh
/// has no preferred orientation. Block boundaries at x,y in {1/3, 2/3}
/// coincide with mesh lines, which requires divisions to be divisible by 3.
///
/// Boundary conditions of the target problem:
///   y = 1  : homogeneous Dirichlet (nodes eliminated from the dof set)
///   y = 0  : unit Neumann flux
///   x = 0,1: adiabatic (natural, nothing to assemble)
struct TriangularMesh {
  std::vector<std::array<double, 2>> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> block_of_triangle;  // 1..9, row-major from bottom-left
  std::vector<std::array<int, 2>> neumann_bottom_edges;  // node pairs on y=0
  std::vector<int> dof_of_node;  // -1 for Dirichlet nodes
  std::vector<int> node_of_dof;
  int divisions = 0;

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
  int n_dofs() const { return static_cast<int>(node_of_dof.size()); }
};

TriangularMesh build_mesh(int divisions_per_side);

/// Dof index of the free node closest to (x, y).
int nearest_free_dof(const TriangularMesh& mesh, double x, double y);

}  // namespace romes
