// Global finite element spaces of polynomial differential forms over a
// simplicial complex, their degrees of freedom, patch restrictions,
// constrained subspaces, and moment evaluation of black-box forms.
//
// Degrees of freedom are the face functionals  u -> int_f tr_f u ^ eta  with
// eta running through the dual space of the face; global ordering is
// (dim f, lexicographic vertex tuple of f, dual index). For faces with
// dim f == k the first dual function is the constant 1, so the coefficient
// of that slot is exactly int_f tr_f u.

#ifndef FEEC_FE_SPACE_HPP
#define FEEC_FE_SPACE_HPP

#include <functional>
#include <map>
#include <memory>
#include <unordered_map>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <json.hpp>

#include "feec/polyform.hpp"
#include "feec/quadrature.hpp"
#include "feec/simplicial_mesh.hpp"

namespace feec {

struct SpaceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnisolvenceError : SpaceError {
  using SpaceError::SpaceError;
};
struct IncompatibleSpecError : SpaceError {
  using SpaceError::SpaceError;
};

struct FormSpaceSpec {
  int k = 0;
  int r = 1;
  Family family = Family::Minus;

  bool operator==(const FormSpaceSpec&) const = default;
  std::string name() const;
};

/// One space per form degree k = 0..n forming an exact polynomial complex.
struct SpecSequence {
  std::vector<FormSpaceSpec> spec;

  static SpecSequence minus_uniform(int r, int n);
  /// P_r Lambda^0 followed by degrees decreasing until the trimmed tail.
  static SpecSequence full_led(int r, int n);
  /// Comma-separated tokens "P2,P2-,P1" (one per form degree).
  static SpecSequence parse(const std::string& text, int n);
  static SpecSequence whitney(int n) { return minus_uniform(1, n); }

  const FormSpaceSpec& operator[](int k) const { return spec[k]; }
  int n() const { return static_cast<int>(spec.size()) - 1; }
  std::string name() const;
  /// Checks the family/degree transition rules that make the complex exact;
  /// throws IncompatibleSpecError otherwise.
  void validate() const;
};

class GlobalSpace {
public:
  GlobalSpace(const SimplicialComplex& mesh, FormSpaceSpec spec);

  const SimplicialComplex& mesh() const { return *m_mesh; }
  const FormSpaceSpec& spec() const { return m_spec; }
  int dim() const { return m_dim; }
  int k() const { return m_spec.k; }

  struct Block {
    int sub_dim = 0;
    int sub_id = 0;
    int offset = 0;
    std::vector<PolyForm> eta;  ///< dual basis on the face
    int size() const { return static_cast<int>(eta.size()); }
  };
  const std::vector<Block>& blocks() const { return m_blocks; }
  /// Block index of a subsimplex, -1 when it carries no dofs.
  int block_of(int m, int id) const;
  const Block& block(int b) const { return m_blocks[b]; }

  const std::vector<int>& cell_dofs(int cell) const { return m_cell_dofs[cell]; }
  const std::vector<PolyForm>& cell_generators(int cell) const {
    return m_cell_data[cell].generators;
  }
  /// Coefficients of the nodal basis in the generator basis (gens x dofs).
  const Eigen::MatrixXd& cell_nodal_coeffs(int cell) const {
    return m_cell_data[cell].nodal;
  }
  PolyForm nodal_form(int cell, int local_dof) const;
  SimplexGeometry cell_geometry(int cell) const;

  const Eigen::MatrixXd& cell_mass(int cell) const;
  const Eigen::MatrixXd& cell_stiffness(int cell) const;

  /// All dof values of a polynomial form given on one cell (in the order of
  /// cell_dofs). The form is expressed in the cell's barycentric frame.
  Eigen::VectorXd cell_dofs_of_form(int cell, const PolyForm& u) const;
  double dof_of_form_on_cell(int b, int comp, int cell, const PolyForm& u) const;

  /// Values of all nodal basis functions at quadrature points:
  /// values (ndofs x npts*ncomps) and dvalues (ndofs x npts*dcomps).
  struct Tabulation {
    Eigen::MatrixXd values, dvalues;
  };
  const Tabulation& cell_tabulation(int cell, int quad_degree) const;

  Eigen::VectorXd evaluate(const Eigen::VectorXd& coeffs, int cell,
                           const Eigen::VectorXd& bary) const;
  Eigen::VectorXd evaluate_d(const Eigen::VectorXd& coeffs, int cell,
                             const Eigen::VectorXd& bary) const;

private:
  const SimplicialComplex* m_mesh;
  FormSpaceSpec m_spec;
  int m_dim = 0;
  std::vector<Block> m_blocks;
  std::vector<std::vector<int>> m_block_of;  // per dim, per sub id
  std::vector<std::vector<int>> m_cell_dofs;

  struct CellData {
    std::vector<PolyForm> generators;
    std::vector<PolyForm> d_generators;
    Eigen::MatrixXd nodal;  // generators x dofs
  };
  std::vector<CellData> m_cell_data;
  mutable std::vector<std::unique_ptr<Eigen::MatrixXd>> m_cell_mass, m_cell_stiff;
  mutable std::map<std::pair<int, int>, Tabulation> m_tab_cache;
};

struct FEForm {
  const GlobalSpace* space = nullptr;
  Eigen::VectorXd coeffs;

  nlohmann::json to_json() const;
  static FEForm from_json(const nlohmann::json& j, const GlobalSpace& space);
};

/// Black-box k-form: componentwise evaluators for u and du in the dx_I
/// basis; the evaluation point is passed with the cell containing it.
struct SampledForm {
  int k = 0;
  std::function<Eigen::VectorXd(int cell, const Eigen::VectorXd& x)> value;
  std::function<Eigen::VectorXd(int cell, const Eigen::VectorXd& x)> dvalue;
  int quad_degree = 8;
};

/// Restriction of a global space to the closed patch: the dofs of all
/// subsimplices of patch cells.
struct PatchSpace {
  const GlobalSpace* space = nullptr;
  Patch patch;
  std::vector<int> dofs;  ///< global dof ids, ascending
  std::unordered_map<int, int> g2l;

  int dim() const { return static_cast<int>(dofs.size()); }
  int local_of(int global_dof) const;
  /// Local indices of a dof block, empty if the block is outside the patch.
  std::vector<int> block_local_dofs(int m, int id) const;
  Eigen::VectorXd restrict_coeffs(const Eigen::VectorXd& global) const;
  void scatter_add(const Eigen::VectorXd& local, Eigen::VectorXd& global) const;
};

PatchSpace restrict_to_patch(const GlobalSpace& space, const Patch& patch);

enum class BoundaryCondition {
  None,
  InteriorOnly,  ///< zero trace on the patch boundary away from the domain boundary
  Full           ///< zero trace on the whole patch boundary
};

/// Column filter describing a constrained subspace of a patch space; all
/// constraints of this project are coefficient selections.
struct SubspaceFilter {
  BoundaryCondition boundary = BoundaryCondition::None;
  bool trace_kernel = false;  ///< drop all dofs attached to faces of the anchor
  bool breve = false;         ///< mean-zero trace on the anchor (see below)
  int anchor_dim = -1;
  int anchor_id = -1;
};

/// Realization of a constrained subspace as the span of unit coefficient
/// vectors; `columns` are local indices into the patch dofs.
struct ConstrainedSubspace {
  std::vector<int> columns;
  int dim() const { return static_cast<int>(columns.size()); }
};

ConstrainedSubspace constrained_subspace(const PatchSpace& ps, const SubspaceFilter& f);

// ---- assembly ----------------------------------------------------------------

Eigen::SparseMatrix<double> mass_matrix(const GlobalSpace& space);
/// Coefficients of du in the target space; rows are evaluated on the lowest
/// adjacent cell of each target dof.
Eigen::SparseMatrix<double> d_matrix(const GlobalSpace& src, const GlobalSpace& dst);

Eigen::MatrixXd patch_mass(const PatchSpace& ps);
Eigen::MatrixXd patch_stiffness(const PatchSpace& ps);
Eigen::MatrixXd patch_d(const PatchSpace& src, const PatchSpace& dst);
/// int_patch a ^ b with the ambient orientation (a of degree k, b of degree n-k).
Eigen::MatrixXd patch_wedge(const PatchSpace& a, const PatchSpace& b);

/// L2 norm of an FE coefficient vector over a cell set.
double fe_l2_norm(const GlobalSpace& space, const Eigen::VectorXd& coeffs,
                  const std::vector<int>& cells);
double fe_l2_norm_d(const GlobalSpace& space, const Eigen::VectorXd& coeffs,
                    const std::vector<int>& cells);

/// Interpolates a piecewise polynomial form (given per cell in the cell's
/// barycentric frame) into the space by applying the dof functionals.
Eigen::VectorXd dof_interpolate(const GlobalSpace& space,
                                const std::function<PolyForm(int cell)>& form);

// ---- sampled-form moments -----------------------------------------------------

/// Per-cell moment tables of one sampled form u against a space:
///   mass[c][i]  = <u, v_i>_T,  stiff[c][i] = <du, d v_i>_T,
/// and optionally  wedge[c][j] = int_T u ^ w_j  against a second space
/// (ambient orientation). Patch moments are sums of cell moments.
struct SampledMoments {
  std::vector<Eigen::VectorXd> mass, stiff, wedge;
};

SampledMoments sampled_moments(const GlobalSpace& space, const SampledForm& u,
                               const GlobalSpace* wedge_space = nullptr);

Eigen::VectorXd patch_moments(const std::vector<Eigen::VectorXd>& cellwise,
                              const GlobalSpace& space, const PatchSpace& ps);

double sampled_l2_norm(const SimplicialComplex& mesh, const SampledForm& u,
                       const std::vector<int>& cells, bool use_d = false);

}  // namespace feec

#endif
