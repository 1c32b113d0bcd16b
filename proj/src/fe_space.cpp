#include "feec/fe_space.hpp"

#include <algorithm>
#include <set>

namespace feec {

std::string FormSpaceSpec::name() const {
  std::string s = "P" + std::to_string(r);
  if (family == Family::Minus) s += "-";
  s += "L" + std::to_string(k);
  return s;
}

SpecSequence SpecSequence::minus_uniform(int r, int n) {
  SpecSequence seq;
  for (int k = 0; k <= n; ++k) seq.spec.push_back({k, r, Family::Minus});
  seq.validate();
  return seq;
}

SpecSequence SpecSequence::full_led(int r, int n) {
  SpecSequence seq;
  seq.spec.push_back({0, r, Family::Full});
  for (int k = 1; k <= n; ++k) {
    const auto& prev = seq.spec.back();
    if (prev.family == Family::Full && prev.r > 1)
      seq.spec.push_back({k, prev.r - 1, Family::Full});
    else
      seq.spec.push_back({k, prev.r, Family::Minus});
  }
  seq.validate();
  return seq;
}

SpecSequence SpecSequence::parse(const std::string& text, int n) {
  SpecSequence seq;
  size_t pos = 0;
  int k = 0;
  while (pos <= text.size() && k <= n) {
    size_t comma = text.find(',', pos);
    std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos
                                                                  : comma - pos);
    if (tok.empty() || tok[0] != 'P')
      throw IncompatibleSpecError("bad space token '" + tok + "'");
    Family fam = Family::Full;
    if (tok.back() == '-') {
      fam = Family::Minus;
      tok.pop_back();
    }
    int r = std::stoi(tok.substr(1));
    seq.spec.push_back({k, r, fam});
    ++k;
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (static_cast<int>(seq.spec.size()) != n + 1)
    throw IncompatibleSpecError("expected " + std::to_string(n + 1) + " space tokens");
  seq.validate();
  return seq;
}

std::string SpecSequence::name() const {
  std::string s;
  for (size_t i = 0; i < spec.size(); ++i) {
    if (i) s += ",";
    s += "P" + std::to_string(spec[i].r) + (spec[i].family == Family::Minus ? "-" : "");
  }
  return s;
}

void SpecSequence::validate() const {
  for (int k = 0; k < static_cast<int>(spec.size()); ++k) {
    if (spec[k].k != k) throw IncompatibleSpecError("spec sequence indices out of order");
    if (spec[k].r < 1) throw IncompatibleSpecError("polynomial degree must be >= 1");
  }
  for (int k = 0; k + 1 < static_cast<int>(spec.size()); ++k) {
    const auto& a = spec[k];
    const auto& b = spec[k + 1];
    const bool same_r_minus = (b.r == a.r && b.family == Family::Minus);
    const bool drop_r_full = (b.r == a.r - 1 && b.family == Family::Full);
    if (!(same_r_minus || drop_r_full))
      throw IncompatibleSpecError("spaces " + a.name() + " -> " + b.name() +
                                  " do not form an exact complex");
  }
}

namespace {

// Scalar dual space with the constant as its first member, so that the
// coefficient of the first slot of a (dim f == k) block is int_f tr_f u.
std::vector<PolyForm> constant_led_scalar_basis(int df, int s) {
  std::vector<PolyForm> out;
  out.push_back(PolyForm::constant(df, 1.0));
  if (s == 0) return out;
  std::vector<int> skip(df + 1, 0);
  skip[0] = s;
  for (const auto& alpha : multi_indices(df + 1, s))
    if (alpha != skip) out.push_back(PolyForm::monomial(df, alpha, {}, 1.0));
  return out;
}

std::vector<PolyForm> dual_basis(const FormSpaceSpec& primal, int df) {
  const int k = primal.k;
  const int j = df - k;
  if (j < 0) return {};
  if (primal.family == Family::Minus) {
    const int s = primal.r + k - df - 1;
    if (s < 0) return {};
    if (j == 0) return constant_led_scalar_basis(df, s);
    return local_basis(Family::Full, s, j, df).forms;
  }
  const int s = primal.r + k - df;
  if (s < 1) return {};
  if (j == 0) return constant_led_scalar_basis(df, s);
  return local_basis(Family::Minus, s, j, df).forms;
}

}  // namespace

GlobalSpace::GlobalSpace(const SimplicialComplex& mesh, FormSpaceSpec spec)
    : m_mesh(&mesh), m_spec(spec) {
  const int n = mesh.dim();
  if (spec.k < 0 || spec.k > n) throw SpaceError("form degree out of range");
  if (spec.r < 1) throw SpaceError("polynomial degree must be >= 1");

  m_block_of.resize(n + 1);
  for (int m = 0; m <= n; ++m) m_block_of[m].assign(mesh.num_subsimplices(m), -1);
  int offset = 0;
  for (int m = spec.k; m <= n; ++m) {
    std::vector<PolyForm> eta = dual_basis(spec, m);
    if (eta.empty()) continue;
    for (int id = 0; id < mesh.num_subsimplices(m); ++id) {
      Block b;
      b.sub_dim = m;
      b.sub_id = id;
      b.offset = offset;
      b.eta = eta;
      offset += b.size();
      m_block_of[m][id] = static_cast<int>(m_blocks.size());
      m_blocks.push_back(std::move(b));
    }
  }
  m_dim = offset;

  const LocalSpaceBasis gens = local_basis(spec.family, spec.r, spec.k, n);
  m_cell_dofs.resize(mesh.num_cells());
  m_cell_data.resize(mesh.num_cells());
  m_cell_mass.resize(mesh.num_cells());
  m_cell_stiff.resize(mesh.num_cells());

  for (int c = 0; c < mesh.num_cells(); ++c) {
    auto& data = m_cell_data[c];
    data.generators = gens.forms;
    data.d_generators.reserve(gens.forms.size());
    for (const auto& g : gens.forms) data.d_generators.push_back(g.exterior_derivative());

    // Cell dof list in global (block, component) order.
    std::vector<std::pair<int, int>> slots;  // (block, comp)
    for (int m = spec.k; m <= n; ++m) {
      const auto& subs = index_subsets(n + 1, m + 1);
      std::vector<int> ids;
      for (const auto& s : subs) {
        std::vector<int> verts;
        for (int p : s) verts.push_back(mesh.subsimplex(n, c).vertices[p]);
        ids.push_back(mesh.subsimplex_id(m, verts));
      }
      std::sort(ids.begin(), ids.end());
      for (int id : ids) {
        int b = m_block_of[m][id];
        if (b < 0) continue;
        for (int comp = 0; comp < m_blocks[b].size(); ++comp) slots.emplace_back(b, comp);
      }
    }
    auto& dofs = m_cell_dofs[c];
    for (auto [b, comp] : slots) dofs.push_back(m_blocks[b].offset + comp);

    if (dofs.size() != gens.forms.size())
      throw UnisolvenceError("dof count " + std::to_string(dofs.size()) +
                             " != local dimension " + std::to_string(gens.forms.size()) +
                             " for " + spec.name());

    Eigen::MatrixXd V(dofs.size(), gens.forms.size());
    for (size_t d = 0; d < slots.size(); ++d) {
      const Block& blk = m_blocks[slots[d].first];
      const auto pos = mesh.face_positions(n, c, blk.sub_dim, blk.sub_id);
      for (size_t g = 0; g < gens.forms.size(); ++g) {
        PolyForm tr = gens.forms[g].trace(pos);
        V(d, g) = integrate_wedge(tr, blk.eta[slots[d].second]);
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(V);
    if (!lu.isInvertible())
      throw UnisolvenceError("dof functionals are not unisolvent for " + spec.name());
    data.nodal = lu.inverse();
  }
}

int GlobalSpace::block_of(int m, int id) const {
  if (m < 0 || m > m_mesh->dim()) return -1;
  return m_block_of[m][id];
}

PolyForm GlobalSpace::nodal_form(int cell, int local_dof) const {
  const auto& data = m_cell_data[cell];
  PolyForm out = PolyForm::zero(m_mesh->dim(), m_spec.k);
  for (size_t g = 0; g < data.generators.size(); ++g) {
    double w = data.nodal(g, local_dof);
    if (w != 0.0) out = out + data.generators[g].scaled(w);
  }
  return out;
}

SimplexGeometry GlobalSpace::cell_geometry(int cell) const {
  return SimplexGeometry(m_mesh->sub_coords(m_mesh->dim(), cell));
}

const Eigen::MatrixXd& GlobalSpace::cell_mass(int cell) const {
  if (!m_cell_mass[cell]) {
    const auto& data = m_cell_data[cell];
    const SimplexGeometry geom = cell_geometry(cell);
    const size_t ng = data.generators.size();
    Eigen::MatrixXd Mg(ng, ng);
    for (size_t i = 0; i < ng; ++i)
      for (size_t j = i; j < ng; ++j) {
        Mg(i, j) = integrate_inner_product(data.generators[i], data.generators[j], geom);
        Mg(j, i) = Mg(i, j);
      }
    m_cell_mass[cell] = std::make_unique<Eigen::MatrixXd>(data.nodal.transpose() * Mg *
                                                          data.nodal);
  }
  return *m_cell_mass[cell];
}

const Eigen::MatrixXd& GlobalSpace::cell_stiffness(int cell) const {
  if (!m_cell_stiff[cell]) {
    const auto& data = m_cell_data[cell];
    const SimplexGeometry geom = cell_geometry(cell);
    const size_t ng = data.generators.size();
    Eigen::MatrixXd Sg(ng, ng);
    for (size_t i = 0; i < ng; ++i)
      for (size_t j = i; j < ng; ++j) {
        Sg(i, j) =
            integrate_inner_product(data.d_generators[i], data.d_generators[j], geom);
        Sg(j, i) = Sg(i, j);
      }
    m_cell_stiff[cell] = std::make_unique<Eigen::MatrixXd>(data.nodal.transpose() * Sg *
                                                           data.nodal);
  }
  return *m_cell_stiff[cell];
}

Eigen::VectorXd GlobalSpace::cell_dofs_of_form(int cell, const PolyForm& u) const {
  const int n = m_mesh->dim();
  const auto& dofs = m_cell_dofs[cell];
  Eigen::VectorXd out(dofs.size());
  for (size_t i = 0; i < dofs.size(); ++i) {
    // locate block/component of this dof
    int b = static_cast<int>(std::upper_bound(m_blocks.begin(), m_blocks.end(), dofs[i],
                                              [](int d, const Block& blk) {
                                                return d < blk.offset;
                                              }) -
                             m_blocks.begin()) -
            1;
    const Block& blk = m_blocks[b];
    const int comp = dofs[i] - blk.offset;
    const auto pos = m_mesh->face_positions(n, cell, blk.sub_dim, blk.sub_id);
    out[i] = integrate_wedge(u.trace(pos), blk.eta[comp]);
  }
  return out;
}

double GlobalSpace::dof_of_form_on_cell(int b, int comp, int cell, const PolyForm& u) const {
  const Block& blk = m_blocks[b];
  const auto pos = m_mesh->face_positions(m_mesh->dim(), cell, blk.sub_dim, blk.sub_id);
  return integrate_wedge(u.trace(pos), blk.eta[comp]);
}

const GlobalSpace::Tabulation& GlobalSpace::cell_tabulation(int cell, int quad_degree) const {
  auto key = std::make_pair(cell, quad_degree);
  auto it = m_tab_cache.find(key);
  if (it != m_tab_cache.end()) return it->second;

  const QuadratureRule& rule = simplex_quadrature(m_mesh->dim(), quad_degree);
  const SimplexGeometry geom = cell_geometry(cell);
  const auto& data = m_cell_data[cell];
  const int ng = static_cast<int>(data.generators.size());
  const int npts = rule.npts();
  const int nc = static_cast<int>(binomial(m_mesh->dim(), m_spec.k));
  const int ndc = static_cast<int>(binomial(m_mesh->dim(), m_spec.k + 1));

  Eigen::MatrixXd gv(ng, npts * nc), gdv(ng, npts * ndc);
  for (int g = 0; g < ng; ++g)
    for (int q = 0; q < npts; ++q) {
      gv.row(g).segment(q * nc, nc) = data.generators[g].evaluate(geom, rule.points.col(q));
      gdv.row(g).segment(q * ndc, ndc) =
          data.d_generators[g].evaluate(geom, rule.points.col(q));
    }
  Tabulation tab;
  tab.values = data.nodal.transpose() * gv;
  tab.dvalues = data.nodal.transpose() * gdv;
  return m_tab_cache.emplace(key, std::move(tab)).first->second;
}

Eigen::VectorXd GlobalSpace::evaluate(const Eigen::VectorXd& coeffs, int cell,
                                      const Eigen::VectorXd& bary) const {
  const auto& data = m_cell_data[cell];
  const auto& dofs = m_cell_dofs[cell];
  Eigen::VectorXd local(dofs.size());
  for (size_t i = 0; i < dofs.size(); ++i) local[i] = coeffs[dofs[i]];
  Eigen::VectorXd gc = data.nodal * local;
  const SimplexGeometry geom = cell_geometry(cell);
  Eigen::VectorXd out =
      Eigen::VectorXd::Zero(binomial(m_mesh->dim(), m_spec.k));
  for (size_t g = 0; g < data.generators.size(); ++g)
    if (gc[g] != 0.0) out += gc[g] * data.generators[g].evaluate(geom, bary);
  return out;
}

Eigen::VectorXd GlobalSpace::evaluate_d(const Eigen::VectorXd& coeffs, int cell,
                                        const Eigen::VectorXd& bary) const {
  const auto& data = m_cell_data[cell];
  const auto& dofs = m_cell_dofs[cell];
  Eigen::VectorXd local(dofs.size());
  for (size_t i = 0; i < dofs.size(); ++i) local[i] = coeffs[dofs[i]];
  Eigen::VectorXd gc = data.nodal * local;
  const SimplexGeometry geom = cell_geometry(cell);
  Eigen::VectorXd out =
      Eigen::VectorXd::Zero(binomial(m_mesh->dim(), m_spec.k + 1));
  for (size_t g = 0; g < data.generators.size(); ++g)
    if (gc[g] != 0.0) out += gc[g] * data.d_generators[g].evaluate(geom, bary);
  return out;
}

nlohmann::json FEForm::to_json() const {
  nlohmann::json j;
  j["spec"] = {{"k", space->spec().k},
               {"r", space->spec().r},
               {"family", space->spec().family == Family::Minus ? "minus" : "full"}};
  j["coefficients"] = std::vector<double>(coeffs.data(), coeffs.data() + coeffs.size());
  return j;
}

FEForm FEForm::from_json(const nlohmann::json& j, const GlobalSpace& space) {
  FEForm u;
  u.space = &space;
  auto vals = j.at("coefficients").get<std::vector<double>>();
  if (static_cast<int>(vals.size()) != space.dim())
    throw SpaceError("coefficient count does not match the space");
  u.coeffs = Eigen::Map<Eigen::VectorXd>(vals.data(), vals.size());
  return u;
}

int PatchSpace::local_of(int global_dof) const {
  auto it = g2l.find(global_dof);
  return it == g2l.end() ? -1 : it->second;
}

std::vector<int> PatchSpace::block_local_dofs(int m, int id) const {
  std::vector<int> out;
  int b = space->block_of(m, id);
  if (b < 0) return out;
  const auto& blk = space->block(b);
  for (int comp = 0; comp < blk.size(); ++comp) {
    int l = local_of(blk.offset + comp);
    if (l < 0) return {};
    out.push_back(l);
  }
  return out;
}

Eigen::VectorXd PatchSpace::restrict_coeffs(const Eigen::VectorXd& global) const {
  Eigen::VectorXd out(dofs.size());
  for (size_t i = 0; i < dofs.size(); ++i) out[i] = global[dofs[i]];
  return out;
}

void PatchSpace::scatter_add(const Eigen::VectorXd& local, Eigen::VectorXd& global) const {
  for (size_t i = 0; i < dofs.size(); ++i) global[dofs[i]] += local[i];
}

PatchSpace restrict_to_patch(const GlobalSpace& space, const Patch& patch) {
  PatchSpace ps;
  ps.space = &space;
  ps.patch = patch;
  const int n = space.mesh().dim();
  for (int m = space.k(); m <= n; ++m)
    for (int id : patch.subs[m]) {
      int b = space.block_of(m, id);
      if (b < 0) continue;
      const auto& blk = space.block(b);
      for (int comp = 0; comp < blk.size(); ++comp) ps.dofs.push_back(blk.offset + comp);
    }
  std::sort(ps.dofs.begin(), ps.dofs.end());
  for (size_t i = 0; i < ps.dofs.size(); ++i) ps.g2l[ps.dofs[i]] = static_cast<int>(i);
  return ps;
}

namespace {

bool is_subset(const std::vector<int>& a, const std::vector<int>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

ConstrainedSubspace constrained_subspace(const PatchSpace& ps, const SubspaceFilter& f) {
  ConstrainedSubspace out;
  const GlobalSpace& space = *ps.space;
  const SimplicialComplex& mesh = space.mesh();
  const std::vector<int>* anchor_verts = nullptr;
  if (f.anchor_dim >= 0)
    anchor_verts = &mesh.subsimplex(f.anchor_dim, f.anchor_id).vertices;

  for (size_t i = 0; i < ps.dofs.size(); ++i) {
    // block and component of this dof
    int lo = 0, hi = static_cast<int>(space.blocks().size()) - 1, b = 0;
    while (lo <= hi) {
      int mid = (lo + hi) / 2;
      if (space.block(mid).offset <= ps.dofs[i]) {
        b = mid;
        lo = mid + 1;
      } else {
        hi = mid - 1;
      }
    }
    const auto& blk = space.block(b);
    const int comp = ps.dofs[i] - blk.offset;
    const auto& verts = mesh.subsimplex(blk.sub_dim, blk.sub_id).vertices;

    bool drop = false;
    if (f.boundary == BoundaryCondition::InteriorOnly &&
        ps.patch.sub_is_constrained(blk.sub_dim, blk.sub_id))
      drop = true;
    if (!drop && f.boundary == BoundaryCondition::Full &&
        ps.patch.sub_on_patch_boundary(blk.sub_dim, blk.sub_id))
      drop = true;
    if (!drop && f.trace_kernel && anchor_verts && is_subset(verts, *anchor_verts))
      drop = true;
    if (!drop && f.breve && anchor_verts) {
      if (f.anchor_dim > space.k()) {
        if (is_subset(verts, *anchor_verts) &&
            !(blk.sub_dim == f.anchor_dim && blk.sub_id == f.anchor_id))
          drop = true;
      } else if (f.anchor_dim == space.k()) {
        if (blk.sub_dim == f.anchor_dim && blk.sub_id == f.anchor_id && comp == 0)
          drop = true;
      }
    }
    if (!drop) out.columns.push_back(static_cast<int>(i));
  }
  return out;
}

Eigen::SparseMatrix<double> mass_matrix(const GlobalSpace& space) {
  std::vector<Eigen::Triplet<double>> trips;
  for (int c = 0; c < space.mesh().num_cells(); ++c) {
    const auto& dofs = space.cell_dofs(c);
    const auto& M = space.cell_mass(c);
    for (size_t i = 0; i < dofs.size(); ++i)
      for (size_t j = 0; j < dofs.size(); ++j)
        trips.emplace_back(dofs[i], dofs[j], M(i, j));
  }
  Eigen::SparseMatrix<double> M(space.dim(), space.dim());
  M.setFromTriplets(trips.begin(), trips.end());
  return M;
}

namespace {

// Rows of the d-matrix: dst dofs of one cell applied to d(nodal basis) of
// the src space on the same cell.
Eigen::MatrixXd cell_d_rows(const GlobalSpace& src, const GlobalSpace& dst, int cell,
                            const std::vector<std::pair<int, int>>& dst_slots) {
  const SimplicialComplex& mesh = src.mesh();
  const int n = mesh.dim();
  const auto& gens = src.cell_generators(cell);
  Eigen::MatrixXd Dg(dst_slots.size(), gens.size());
  for (size_t t = 0; t < dst_slots.size(); ++t) {
    const auto& blk = dst.block(dst_slots[t].first);
    const auto pos = mesh.face_positions(n, cell, blk.sub_dim, blk.sub_id);
    for (size_t g = 0; g < gens.size(); ++g) {
      PolyForm dg = gens[g].exterior_derivative();
      Dg(t, g) = integrate_wedge(dg.trace(pos), blk.eta[dst_slots[t].second]);
    }
  }
  return Dg * src.cell_nodal_coeffs(cell);
}

}  // namespace

Eigen::SparseMatrix<double> d_matrix(const GlobalSpace& src, const GlobalSpace& dst) {
  if (dst.k() != src.k() + 1) throw SpaceError("d_matrix: target degree must be k+1");
  const SimplicialComplex& mesh = src.mesh();
  std::vector<Eigen::Triplet<double>> trips;
  // group dst blocks by the lowest adjacent cell
  std::vector<std::vector<int>> by_cell(mesh.num_cells());
  for (size_t b = 0; b < dst.blocks().size(); ++b) {
    const auto& blk = dst.block(b);
    int cell = mesh.subsimplex(blk.sub_dim, blk.sub_id).cofaces.front();
    by_cell[cell].push_back(static_cast<int>(b));
  }
  for (int c = 0; c < mesh.num_cells(); ++c) {
    if (by_cell[c].empty()) continue;
    std::vector<std::pair<int, int>> slots;
    for (int b : by_cell[c])
      for (int comp = 0; comp < dst.block(b).size(); ++comp) slots.emplace_back(b, comp);
    Eigen::MatrixXd D = cell_d_rows(src, dst, c, slots);
    const auto& src_dofs = src.cell_dofs(c);
    for (size_t t = 0; t < slots.size(); ++t) {
      int row = dst.block(slots[t].first).offset + slots[t].second;
      for (size_t j = 0; j < src_dofs.size(); ++j)
        if (D(t, j) != 0.0) trips.emplace_back(row, src_dofs[j], D(t, j));
    }
  }
  Eigen::SparseMatrix<double> Dmat(dst.dim(), src.dim());
  Dmat.setFromTriplets(trips.begin(), trips.end());
  return Dmat;
}

namespace {

template <typename ElementFn>
Eigen::MatrixXd assemble_patch(const PatchSpace& rows, const PatchSpace& cols,
                               ElementFn&& element) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(rows.dim(), cols.dim());
  for (int c : rows.patch.cells) {
    Eigen::MatrixXd E = element(c);
    const auto& rd = rows.space->cell_dofs(c);
    const auto& cd = cols.space->cell_dofs(c);
    for (size_t i = 0; i < rd.size(); ++i) {
      int li = rows.local_of(rd[i]);
      for (size_t j = 0; j < cd.size(); ++j) M(li, cols.local_of(cd[j])) += E(i, j);
    }
  }
  return M;
}

}  // namespace

Eigen::MatrixXd patch_mass(const PatchSpace& ps) {
  return assemble_patch(ps, ps, [&](int c) { return ps.space->cell_mass(c); });
}

Eigen::MatrixXd patch_stiffness(const PatchSpace& ps) {
  return assemble_patch(ps, ps, [&](int c) { return ps.space->cell_stiffness(c); });
}

Eigen::MatrixXd patch_d(const PatchSpace& src, const PatchSpace& dst) {
  const GlobalSpace& S = *src.space;
  const GlobalSpace& D = *dst.space;
  const SimplicialComplex& mesh = S.mesh();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dst.dim(), src.dim());
  const auto& cells = src.patch.cells;
  for (size_t b = 0; b < D.blocks().size(); ++b) {
    const auto& blk = D.block(b);
    if (!src.patch.contains_sub(blk.sub_dim, blk.sub_id)) continue;
    // lowest adjacent cell inside the patch
    int cell = -1;
    for (int c : mesh.subsimplex(blk.sub_dim, blk.sub_id).cofaces)
      if (std::binary_search(cells.begin(), cells.end(), c)) {
        cell = c;
        break;
      }
    std::vector<std::pair<int, int>> slots;
    for (int comp = 0; comp < blk.size(); ++comp)
      slots.emplace_back(static_cast<int>(b), comp);
    Eigen::MatrixXd Drows = cell_d_rows(S, D, cell, slots);
    const auto& src_dofs = S.cell_dofs(cell);
    for (size_t t = 0; t < slots.size(); ++t) {
      int row = dst.local_of(blk.offset + static_cast<int>(t));
      for (size_t j = 0; j < src_dofs.size(); ++j)
        out(row, src.local_of(src_dofs[j])) = Drows(t, j);
    }
  }
  return out;
}

Eigen::MatrixXd patch_wedge(const PatchSpace& a, const PatchSpace& b) {
  const SimplicialComplex& mesh = a.space->mesh();
  return assemble_patch(a, b, [&](int c) {
    const auto& ga = a.space->cell_generators(c);
    const auto& gb = b.space->cell_generators(c);
    Eigen::MatrixXd Wg(ga.size(), gb.size());
    for (size_t i = 0; i < ga.size(); ++i)
      for (size_t j = 0; j < gb.size(); ++j) Wg(i, j) = integrate_wedge(ga[i], gb[j]);
    Wg *= mesh.cell_orientation(c);
    return Eigen::MatrixXd(a.space->cell_nodal_coeffs(c).transpose() * Wg *
                           b.space->cell_nodal_coeffs(c));
  });
}

double fe_l2_norm(const GlobalSpace& space, const Eigen::VectorXd& coeffs,
                  const std::vector<int>& cells) {
  double total = 0.0;
  for (int c : cells) {
    const auto& dofs = space.cell_dofs(c);
    Eigen::VectorXd local(dofs.size());
    for (size_t i = 0; i < dofs.size(); ++i) local[i] = coeffs[dofs[i]];
    total += local.dot(space.cell_mass(c) * local);
  }
  return std::sqrt(std::max(0.0, total));
}

double fe_l2_norm_d(const GlobalSpace& space, const Eigen::VectorXd& coeffs,
                    const std::vector<int>& cells) {
  double total = 0.0;
  for (int c : cells) {
    const auto& dofs = space.cell_dofs(c);
    Eigen::VectorXd local(dofs.size());
    for (size_t i = 0; i < dofs.size(); ++i) local[i] = coeffs[dofs[i]];
    total += local.dot(space.cell_stiffness(c) * local);
  }
  return std::sqrt(std::max(0.0, total));
}

Eigen::VectorXd dof_interpolate(const GlobalSpace& space,
                                const std::function<PolyForm(int cell)>& form) {
  Eigen::VectorXd out(space.dim());
  const SimplicialComplex& mesh = space.mesh();
  for (size_t b = 0; b < space.blocks().size(); ++b) {
    const auto& blk = space.block(b);
    const int cell = mesh.subsimplex(blk.sub_dim, blk.sub_id).cofaces.front();
    const PolyForm u = form(cell);
    for (int comp = 0; comp < blk.size(); ++comp)
      out[blk.offset + comp] =
          space.dof_of_form_on_cell(static_cast<int>(b), comp, cell, u);
  }
  return out;
}

SampledMoments sampled_moments(const GlobalSpace& space, const SampledForm& u,
                               const GlobalSpace* wedge_space) {
  const SimplicialComplex& mesh = space.mesh();
  const int n = mesh.dim();
  if (u.k != space.k()) throw SpaceError("sampled form degree mismatch");
  const int nc = static_cast<int>(binomial(n, u.k));
  const int ndc = static_cast<int>(binomial(n, u.k + 1));
  const int wc = wedge_space ? static_cast<int>(binomial(n, n - u.k)) : 0;

  // sign and complement tables for the top-degree wedge u ^ w
  std::vector<int> comp_slot(nc), comp_sign(nc);
  if (wedge_space) {
    const auto& sets = index_subsets(n, u.k);
    const auto& csets = index_subsets(n, n - u.k);
    std::map<std::vector<int>, int> cslot;
    for (size_t i = 0; i < csets.size(); ++i) cslot[csets[i]] = static_cast<int>(i);
    for (int i = 0; i < nc; ++i) {
      std::vector<int> rest;
      for (int v = 0; v < n; ++v)
        if (!std::binary_search(sets[i].begin(), sets[i].end(), v)) rest.push_back(v);
      std::vector<int> merged = sets[i];
      merged.insert(merged.end(), rest.begin(), rest.end());
      int sign = 1;  // inversions of (sets[i], rest)
      for (size_t a = 0; a < merged.size(); ++a)
        for (size_t b2 = a + 1; b2 < merged.size(); ++b2)
          if (merged[a] > merged[b2]) sign = -sign;
      comp_slot[i] = cslot.at(rest);
      comp_sign[i] = sign;
    }
  }

  SampledMoments out;
  out.mass.resize(mesh.num_cells());
  out.stiff.resize(mesh.num_cells());
  if (wedge_space) out.wedge.resize(mesh.num_cells());

  for (int c = 0; c < mesh.num_cells(); ++c) {
    const QuadratureRule& rule = simplex_quadrature(n, u.quad_degree);
    const auto& tab = space.cell_tabulation(c, u.quad_degree);
    const SimplexGeometry geom = space.cell_geometry(c);
    const double vol = mesh.cell_volume(c);
    Eigen::VectorXd uflat(rule.npts() * nc), duflat(rule.npts() * ndc);
    Eigen::VectorXd wtilde;
    if (wedge_space) wtilde = Eigen::VectorXd::Zero(rule.npts() * wc);
    for (int q = 0; q < rule.npts(); ++q) {
      Eigen::VectorXd x = geom.point(rule.points.col(q));
      Eigen::VectorXd uv = u.value(c, x);
      Eigen::VectorXd duv = u.dvalue(c, x);
      const double w = rule.weights[q] * vol;
      uflat.segment(q * nc, nc) = w * uv;
      duflat.segment(q * ndc, ndc) = w * duv;
      if (wedge_space)
        for (int i = 0; i < nc; ++i)
          wtilde[q * wc + comp_slot[i]] += w * comp_sign[i] * uv[i];
    }
    out.mass[c] = tab.values * uflat;
    out.stiff[c] = tab.dvalues * duflat;
    if (wedge_space) {
      const auto& wtab = wedge_space->cell_tabulation(c, u.quad_degree);
      out.wedge[c] = wtab.values * wtilde;
    }
  }
  return out;
}

Eigen::VectorXd patch_moments(const std::vector<Eigen::VectorXd>& cellwise,
                              const GlobalSpace& space, const PatchSpace& ps) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(ps.dim());
  for (int c : ps.patch.cells) {
    const auto& dofs = space.cell_dofs(c);
    for (size_t i = 0; i < dofs.size(); ++i) {
      int l = ps.local_of(dofs[i]);
      if (l >= 0) out[l] += cellwise[c][i];
    }
  }
  return out;
}

double sampled_l2_norm(const SimplicialComplex& mesh, const SampledForm& u,
                       const std::vector<int>& cells, bool use_d) {
  double total = 0.0;
  const int n = mesh.dim();
  for (int c : cells) {
    const QuadratureRule& rule = simplex_quadrature(n, u.quad_degree);
    const SimplexGeometry geom(mesh.sub_coords(n, c));
    for (int q = 0; q < rule.npts(); ++q) {
      Eigen::VectorXd x = geom.point(rule.points.col(q));
      Eigen::VectorXd v = use_d ? u.dvalue(c, x) : u.value(c, x);
      total += rule.weights[q] * mesh.cell_volume(c) * v.squaredNorm();
    }
  }
  return std::sqrt(std::max(0.0, total));
}

}  // namespace feec
