// Oriented simplicial complexes with full subsimplex tables, macroelement
// patches and locality domains. Geometry lives in R^2 or R^3; the
// combinatorial layer is dimension-generic.

#ifndef FEEC_SIMPLICIAL_MESH_HPP
#define FEEC_SIMPLICIAL_MESH_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include <json.hpp>

namespace feec {

struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateCellError : MeshError {
  using MeshError::MeshError;
};
struct DuplicateCellError : MeshError {
  using MeshError::MeshError;
};
struct NonManifoldError : MeshError {
  using MeshError::MeshError;
};
struct ContractibilityError : MeshError {
  using MeshError::MeshError;
};

struct MeshBuildOptions {
  bool allow_nonmanifold = false;
};

/// A subsimplex of the triangulation, stored as an ascending tuple of global
/// vertex ids. Orientation is the one induced by the ascending order.
struct Subsimplex {
  std::vector<int> vertices;
  std::vector<int> cofaces;  ///< ids of cells whose closure contains this
};

enum class PatchKind { Macro, Extended };

/// Macroelement (all cells containing the anchor) or extended macroelement
/// (union of the vertex macroelements of the anchor).
struct Patch {
  PatchKind kind = PatchKind::Macro;
  int anchor_dim = 0;
  int anchor_id = 0;
  std::vector<int> cells;  ///< sorted cell ids

  /// Subsimplex ids contained in the closed patch, one sorted list per dim.
  std::vector<std::vector<int>> subs;
  /// (n-1)-faces of the patch boundary that are not part of the domain
  /// boundary; traces of "zero boundary" subspaces vanish here.
  std::vector<int> interior_boundary_faces;
  /// (n-1)-faces of the patch boundary lying on the domain boundary.
  std::vector<int> domain_boundary_faces;
  /// Per dim: sorted subsimplex ids contained in some interior boundary face.
  std::vector<std::vector<int>> constrained_subs;
  /// Per dim: sorted subsimplex ids contained in any patch boundary face.
  std::vector<std::vector<int>> boundary_subs;

  bool contains_sub(int m, int id) const;
  bool sub_is_constrained(int m, int id) const;
  bool sub_on_patch_boundary(int m, int id) const;
};

/// Cell set D_{m,T} on which the projection restricted to T may depend.
struct LocalityDomain {
  int anchor_cell = 0;
  int level = 0;
  std::vector<int> cells;  ///< sorted
};

class SimplicialComplex {
public:
  /// Builds the full subsimplex lattice, adjacency and orientation data.
  /// Cells are stored with ascending vertex ids; the geometric orientation
  /// sign of the ascending order is kept per cell.
  static SimplicialComplex build(std::vector<Eigen::VectorXd> vertices,
                                 std::vector<std::vector<int>> cells,
                                 const MeshBuildOptions& opts = {});

  /// Mesh ingestion from {"dim": n, "vertices": [[...]], "cells": [[...]]}.
  static SimplicialComplex from_json(const nlohmann::json& j,
                                     const MeshBuildOptions& opts = {});

  int dim() const { return m_dim; }
  int num_vertices() const { return static_cast<int>(m_vertices.size()); }
  int num_cells() const { return num_subsimplices(m_dim); }
  const Eigen::VectorXd& vertex(int v) const { return m_vertices[v]; }

  int num_subsimplices(int m) const { return static_cast<int>(m_subs[m].size()); }
  const Subsimplex& subsimplex(int m, int id) const { return m_subs[m][id]; }
  /// Lookup by ascending vertex tuple; -1 if absent.
  int subsimplex_id(int m, const std::vector<int>& vertices) const;

  /// Faces of a subsimplex with the Stokes signs ((f_0,+1),(f_1,-1),...).
  std::vector<std::pair<int, int>> subsimplex_boundary(int m, int id) const;

  /// Positions (0-based) of the vertices of g within the ascending tuple of
  /// the containing subsimplex f. Throws if g is not a face of f.
  std::vector<int> face_positions(int m_f, int f, int m_g, int g) const;

  double cell_volume(int cell) const { return m_cell_volume[cell]; }
  double cell_diameter(int cell) const { return m_cell_diameter[cell]; }
  /// +1 if the ascending vertex order is positively oriented in R^n.
  int cell_orientation(int cell) const { return m_cell_orientation[cell]; }
  double diameter(int m, int id) const;
  double mesh_size() const { return m_mesh_size; }
  /// max over cells of h_T^n / |T|.
  double shape_regularity() const { return m_shape_regularity; }

  /// n x (m+1) matrix of vertex coordinates of a subsimplex.
  Eigen::MatrixXd sub_coords(int m, int id) const;

  bool on_domain_boundary(int m, int id) const { return m_on_boundary[m][id]; }

  Patch macro_patch(int m, int id) const;
  Patch extended_patch(int m, int id) const;
  /// Patch built from an explicit cell set (used by checks and tests).
  Patch patch_from_cells(std::vector<int> cells) const;

  LocalityDomain locality_domain(int cell, int level) const;

  /// max over cells T of #{f : T in extended patch of f}.
  int max_patch_overlap() const;

  const std::vector<int>& boundary_faces() const { return m_boundary_faces; }

private:
  int m_dim = 0;
  std::vector<Eigen::VectorXd> m_vertices;
  std::vector<std::vector<Subsimplex>> m_subs;  // per dim, lex-sorted
  std::vector<std::map<std::vector<int>, int>> m_sub_index;
  std::vector<double> m_cell_volume, m_cell_diameter;
  std::vector<int> m_cell_orientation;
  std::vector<std::vector<bool>> m_on_boundary;  // per dim
  std::vector<int> m_boundary_faces;             // (n-1)-face ids on domain boundary
  double m_mesh_size = 0.0, m_shape_regularity = 0.0;

  void finish_patch(Patch& p) const;
};

/// Rank test of the lowest-order local complexes (with and without boundary
/// conditions) against the Betti numbers of a contractible patch.
bool verify_patch_contractible(const SimplicialComplex& mesh, const Patch& patch);

/// N x N unit square, each square split by a diagonal with direction
/// alternating in a criss-cross pattern.
SimplicialComplex unit_square_crisscross(int n);

/// N x N x N unit cube, each small cube split into 6 tetrahedra
/// (Kuhn/Freudenthal subdivision).
SimplicialComplex unit_cube_kuhn(int n);

}  // namespace feec

#endif
