#include "feec/simplicial_mesh.hpp"

#include <algorithm>
#include <set>

namespace feec {

namespace {

// All ascending index subsets of size m+1 of an ascending tuple.
void enumerate_subsets(const std::vector<int>& tuple, int size,
                       std::vector<std::vector<int>>& out) {
  std::vector<int> idx(size);
  for (int i = 0; i < size; ++i) idx[i] = i;
  const int n = static_cast<int>(tuple.size());
  while (true) {
    std::vector<int> sub(size);
    for (int i = 0; i < size; ++i) sub[i] = tuple[idx[i]];
    out.push_back(std::move(sub));
    int pos = size - 1;
    while (pos >= 0 && idx[pos] == n - size + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int i = pos + 1; i < size; ++i) idx[i] = idx[i - 1] + 1;
  }
}

}  // namespace

bool Patch::contains_sub(int m, int id) const {
  return std::binary_search(subs[m].begin(), subs[m].end(), id);
}

bool Patch::sub_is_constrained(int m, int id) const {
  return std::binary_search(constrained_subs[m].begin(), constrained_subs[m].end(), id);
}

bool Patch::sub_on_patch_boundary(int m, int id) const {
  return std::binary_search(boundary_subs[m].begin(), boundary_subs[m].end(), id);
}

SimplicialComplex SimplicialComplex::build(std::vector<Eigen::VectorXd> vertices,
                                           std::vector<std::vector<int>> cells,
                                           const MeshBuildOptions& opts) {
  SimplicialComplex mesh;
  if (vertices.empty() || cells.empty()) throw MeshError("empty mesh");
  mesh.m_dim = static_cast<int>(vertices[0].size());
  const int n = mesh.m_dim;
  mesh.m_vertices = std::move(vertices);

  for (auto& c : cells) {
    if (static_cast<int>(c.size()) != n + 1)
      throw MeshError("cell must have n+1 vertices");
    for (int v : c)
      if (v < 0 || v >= static_cast<int>(mesh.m_vertices.size()))
        throw MeshError("cell references invalid vertex " + std::to_string(v));
    std::sort(c.begin(), c.end());
    if (std::adjacent_find(c.begin(), c.end()) != c.end())
      throw DegenerateCellError("cell repeats a vertex");
  }
  {
    auto sorted = cells;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw DuplicateCellError("duplicate cell");
  }

  // Subsimplex tables, lex-sorted per dimension.
  mesh.m_subs.resize(n + 1);
  mesh.m_sub_index.resize(n + 1);
  for (int m = 0; m <= n; ++m) {
    std::set<std::vector<int>> found;
    for (const auto& c : cells) {
      std::vector<std::vector<int>> subs;
      enumerate_subsets(c, m + 1, subs);
      for (auto& s : subs) found.insert(std::move(s));
    }
    for (const auto& s : found) {
      mesh.m_sub_index[m][s] = static_cast<int>(mesh.m_subs[m].size());
      mesh.m_subs[m].push_back(Subsimplex{s, {}});
    }
  }
  for (int cid = 0; cid < static_cast<int>(cells.size()); ++cid) {
    for (int m = 0; m <= n; ++m) {
      std::vector<std::vector<int>> subs;
      enumerate_subsets(cells[cid], m + 1, subs);
      for (const auto& s : subs)
        mesh.m_subs[m][mesh.m_sub_index[m].at(s)].cofaces.push_back(cid);
    }
  }

  // Geometry per cell.
  const int ncells = mesh.num_cells();
  mesh.m_cell_volume.resize(ncells);
  mesh.m_cell_diameter.resize(ncells);
  mesh.m_cell_orientation.resize(ncells);
  for (int cid = 0; cid < ncells; ++cid) {
    const auto& vs = mesh.m_subs[n][cid].vertices;
    Eigen::MatrixXd edges(n, n);
    for (int i = 0; i < n; ++i)
      edges.col(i) = mesh.m_vertices[vs[i + 1]] - mesh.m_vertices[vs[0]];
    double det = edges.determinant();
    double diam = 0.0;
    for (int i = 0; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j)
        diam = std::max(diam, (mesh.m_vertices[vs[i]] - mesh.m_vertices[vs[j]]).norm());
    double fact = 1.0;
    for (int i = 2; i <= n; ++i) fact *= i;
    double vol = std::abs(det) / fact;
    if (!(vol > 1e-12 * std::pow(diam, n)))
      throw DegenerateCellError("cell " + std::to_string(cid) + " has zero volume");
    mesh.m_cell_volume[cid] = vol;
    mesh.m_cell_diameter[cid] = diam;
    mesh.m_cell_orientation[cid] = det > 0 ? 1 : -1;
    mesh.m_mesh_size = std::max(mesh.m_mesh_size, diam);
    mesh.m_shape_regularity = std::max(mesh.m_shape_regularity, std::pow(diam, n) / vol);
  }

  // Domain boundary: (n-1)-faces with a single coface, then downward closure.
  mesh.m_on_boundary.resize(n + 1);
  for (int m = 0; m <= n; ++m)
    mesh.m_on_boundary[m].assign(mesh.num_subsimplices(m), false);
  for (int fid = 0; fid < mesh.num_subsimplices(n - 1); ++fid) {
    const auto& f = mesh.m_subs[n - 1][fid];
    if (static_cast<int>(f.cofaces.size()) > 2 && !opts.allow_nonmanifold)
      throw NonManifoldError("face shared by more than two cells");
    if (f.cofaces.size() == 1) {
      mesh.m_boundary_faces.push_back(fid);
      mesh.m_on_boundary[n - 1][fid] = true;
      for (int m = 0; m < n - 1; ++m) {
        std::vector<std::vector<int>> subs;
        enumerate_subsets(f.vertices, m + 1, subs);
        for (const auto& s : subs)
          mesh.m_on_boundary[m][mesh.m_sub_index[m].at(s)] = true;
      }
    }
  }
  return mesh;
}

SimplicialComplex SimplicialComplex::from_json(const nlohmann::json& j,
                                               const MeshBuildOptions& opts) {
  const int n = j.at("dim").get<int>();
  std::vector<Eigen::VectorXd> vertices;
  for (const auto& row : j.at("vertices")) {
    Eigen::VectorXd x(n);
    if (static_cast<int>(row.size()) != n) throw MeshError("vertex has wrong dimension");
    for (int i = 0; i < n; ++i) x[i] = row[i].get<double>();
    vertices.push_back(std::move(x));
  }
  std::vector<std::vector<int>> cells;
  for (const auto& row : j.at("cells")) cells.push_back(row.get<std::vector<int>>());
  return build(std::move(vertices), std::move(cells), opts);
}

int SimplicialComplex::subsimplex_id(int m, const std::vector<int>& vertices) const {
  auto it = m_sub_index[m].find(vertices);
  return it == m_sub_index[m].end() ? -1 : it->second;
}

std::vector<std::pair<int, int>> SimplicialComplex::subsimplex_boundary(int m, int id) const {
  if (m < 1) throw MeshError("boundary of a vertex");
  const auto& vs = m_subs[m][id].vertices;
  std::vector<std::pair<int, int>> out;
  int sign = 1;
  for (int j = 0; j <= m; ++j, sign = -sign) {
    std::vector<int> face;
    face.reserve(m);
    for (int i = 0; i <= m; ++i)
      if (i != j) face.push_back(vs[i]);
    out.emplace_back(m_sub_index[m - 1].at(face), sign);
  }
  return out;
}

std::vector<int> SimplicialComplex::face_positions(int m_f, int f, int m_g, int g) const {
  const auto& fv = m_subs[m_f][f].vertices;
  const auto& gv = m_subs[m_g][g].vertices;
  std::vector<int> pos;
  pos.reserve(gv.size());
  for (int v : gv) {
    auto it = std::lower_bound(fv.begin(), fv.end(), v);
    if (it == fv.end() || *it != v) throw MeshError("not a face");
    pos.push_back(static_cast<int>(it - fv.begin()));
  }
  return pos;
}

double SimplicialComplex::diameter(int m, int id) const {
  const auto& vs = m_subs[m][id].vertices;
  double d = 0.0;
  for (size_t i = 0; i < vs.size(); ++i)
    for (size_t j = i + 1; j < vs.size(); ++j)
      d = std::max(d, (m_vertices[vs[i]] - m_vertices[vs[j]]).norm());
  return d;
}

Eigen::MatrixXd SimplicialComplex::sub_coords(int m, int id) const {
  const auto& vs = m_subs[m][id].vertices;
  Eigen::MatrixXd X(m_dim, m + 1);
  for (int i = 0; i <= m; ++i) X.col(i) = m_vertices[vs[i]];
  return X;
}

void SimplicialComplex::finish_patch(Patch& p) const {
  const int n = m_dim;
  std::sort(p.cells.begin(), p.cells.end());
  p.cells.erase(std::unique(p.cells.begin(), p.cells.end()), p.cells.end());

  p.subs.assign(n + 1, {});
  for (int m = 0; m <= n; ++m) {
    std::set<int> ids;
    for (int cid : p.cells) {
      std::vector<std::vector<int>> subs;
      enumerate_subsets(m_subs[n][cid].vertices, m + 1, subs);
      for (const auto& s : subs) ids.insert(m_sub_index[m].at(s));
    }
    p.subs[m].assign(ids.begin(), ids.end());
  }

  // Patch boundary faces have exactly one incident cell inside the patch.
  std::vector<int> boundary;
  for (int fid : p.subs[n - 1]) {
    int inside = 0;
    for (int cid : m_subs[n - 1][fid].cofaces)
      if (std::binary_search(p.cells.begin(), p.cells.end(), cid)) ++inside;
    if (inside == 1) boundary.push_back(fid);
  }
  std::set<int> constrained_faces;
  for (int fid : boundary) {
    if (m_on_boundary[n - 1][fid])
      p.domain_boundary_faces.push_back(fid);
    else {
      p.interior_boundary_faces.push_back(fid);
      constrained_faces.insert(fid);
    }
  }
  p.constrained_subs.assign(n + 1, {});
  p.boundary_subs.assign(n + 1, {});
  std::vector<std::set<int>> acc(n), acc_all(n);
  for (int fid : boundary) {
    const bool constrained = constrained_faces.count(fid) > 0;
    for (int m = 0; m <= n - 1; ++m) {
      std::vector<std::vector<int>> subs;
      enumerate_subsets(m_subs[n - 1][fid].vertices, m + 1, subs);
      for (const auto& s : subs) {
        int id = m_sub_index[m].at(s);
        acc_all[m].insert(id);
        if (constrained) acc[m].insert(id);
      }
    }
  }
  for (int m = 0; m <= n - 1; ++m) {
    p.constrained_subs[m].assign(acc[m].begin(), acc[m].end());
    p.boundary_subs[m].assign(acc_all[m].begin(), acc_all[m].end());
  }
}

Patch SimplicialComplex::macro_patch(int m, int id) const {
  Patch p;
  p.kind = PatchKind::Macro;
  p.anchor_dim = m;
  p.anchor_id = id;
  p.cells = m_subs[m][id].cofaces;
  finish_patch(p);
  return p;
}

Patch SimplicialComplex::extended_patch(int m, int id) const {
  Patch p;
  p.kind = PatchKind::Extended;
  p.anchor_dim = m;
  p.anchor_id = id;
  for (int v : m_subs[m][id].vertices) {
    int vid = m_sub_index[0].at({v});
    const auto& star = m_subs[0][vid].cofaces;
    p.cells.insert(p.cells.end(), star.begin(), star.end());
  }
  finish_patch(p);
  return p;
}

Patch SimplicialComplex::patch_from_cells(std::vector<int> cells) const {
  Patch p;
  p.kind = PatchKind::Macro;
  p.anchor_dim = m_dim;
  p.anchor_id = cells.empty() ? 0 : cells.front();
  p.cells = std::move(cells);
  finish_patch(p);
  return p;
}

LocalityDomain SimplicialComplex::locality_domain(int cell, int level) const {
  LocalityDomain dom;
  dom.anchor_cell = cell;
  dom.level = level;
  // D_{0,T} = extended patch of T; D_{m,T} unions D_{m-1,T'} over cells T'
  // of the macroelement of each m-face of T.
  std::vector<std::vector<std::set<int>>> memo(level + 1);
  for (auto& lvl : memo) lvl.resize(num_cells());
  auto compute = [&](auto&& self, int lvl, int T) -> const std::set<int>& {
    auto& slot = memo[lvl][T];
    if (!slot.empty()) return slot;
    if (lvl == 0) {
      Patch p = extended_patch(m_dim, T);
      slot.insert(p.cells.begin(), p.cells.end());
      return slot;
    }
    std::set<int> out;
    std::vector<std::vector<int>> faces;
    enumerate_subsets(m_subs[m_dim][T].vertices, lvl + 1, faces);
    for (const auto& fv : faces) {
      int fid = m_sub_index[lvl].at(fv);
      for (int other : m_subs[lvl][fid].cofaces) {
        const auto& inner = self(self, lvl - 1, other);
        out.insert(inner.begin(), inner.end());
      }
    }
    slot = std::move(out);
    return slot;
  };
  const auto& cells = compute(compute, level, cell);
  dom.cells.assign(cells.begin(), cells.end());
  return dom;
}

int SimplicialComplex::max_patch_overlap() const {
  std::vector<int> count(num_cells(), 0);
  for (int m = 0; m <= m_dim; ++m)
    for (int id = 0; id < num_subsimplices(m); ++id) {
      Patch p = extended_patch(m, id);
      for (int cid : p.cells) ++count[cid];
    }
  return *std::max_element(count.begin(), count.end());
}

namespace {

// Signed incidence matrix of the lowest-order complex on a patch: the
// coefficient of du at a (k+1)-subsimplex is the signed sum of the
// coefficients of u on its faces.
Eigen::MatrixXd whitney_incidence(const SimplicialComplex& mesh, int k,
                                  const std::vector<int>& rows,
                                  const std::vector<int>& cols) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(rows.size(), cols.size());
  std::map<int, int> col_of;
  for (size_t j = 0; j < cols.size(); ++j) col_of[cols[j]] = static_cast<int>(j);
  for (size_t i = 0; i < rows.size(); ++i) {
    for (auto [face, sign] : mesh.subsimplex_boundary(k + 1, rows[i])) {
      auto it = col_of.find(face);
      if (it != col_of.end()) D(i, it->second) = sign;
    }
  }
  return D;
}

int int_rank(const Eigen::MatrixXd& M) {
  if (M.rows() == 0 || M.cols() == 0) return 0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  lu.setThreshold(1e-10);
  return static_cast<int>(lu.rank());
}

}  // namespace

bool verify_patch_contractible(const SimplicialComplex& mesh, const Patch& patch) {
  const int n = mesh.dim();

  // Full complex: H^0 = R, H^k = 0 for k >= 1.
  std::vector<int> rank(n);
  for (int k = 0; k < n; ++k)
    rank[k] = int_rank(whitney_incidence(mesh, k, patch.subs[k + 1], patch.subs[k]));
  if (rank[0] != static_cast<int>(patch.subs[0].size()) - 1) return false;
  for (int k = 1; k < n; ++k) {
    int kernel = static_cast<int>(patch.subs[k].size()) - rank[k];
    if (kernel != rank[k - 1]) return false;
  }
  if (rank[n - 1] != static_cast<int>(patch.subs[n].size())) return false;

  // Zero-trace complex: cohomology R at top degree only. The topological
  // check constrains the whole patch boundary, including the part on the
  // domain boundary.
  std::vector<int> all_boundary = patch.interior_boundary_faces;
  all_boundary.insert(all_boundary.end(), patch.domain_boundary_faces.begin(),
                      patch.domain_boundary_faces.end());
  std::vector<std::vector<int>> interior(n + 1);
  for (int m = 0; m <= n; ++m) {
    for (int id : patch.subs[m]) {
      bool on_bnd = false;
      if (m <= n - 1) {
        const auto& vs = mesh.subsimplex(m, id).vertices;
        for (int fid : all_boundary) {
          const auto& fv = mesh.subsimplex(n - 1, fid).vertices;
          if (std::includes(fv.begin(), fv.end(), vs.begin(), vs.end())) { on_bnd = true; break; }
        }
      }
      if (!on_bnd) interior[m].push_back(id);
    }
  }
  std::vector<int> rank0(n);
  for (int k = 0; k < n; ++k)
    rank0[k] = int_rank(whitney_incidence(mesh, k, interior[k + 1], interior[k]));
  if (rank0[0] != static_cast<int>(interior[0].size())) return false;  // injective
  for (int k = 1; k < n; ++k) {
    int kernel = static_cast<int>(interior[k].size()) - rank0[k];
    if (kernel != rank0[k - 1]) return false;
  }
  if (static_cast<int>(interior[n].size()) - rank0[n - 1] != 1) return false;
  return true;
}

SimplicialComplex unit_square_crisscross(int n) {
  if (n < 1) throw MeshError("need n >= 1");
  std::vector<Eigen::VectorXd> vertices;
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      Eigen::VectorXd x(2);
      x << double(i) / n, double(j) / n;
      vertices.push_back(x);
    }
  std::vector<std::vector<int>> cells;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      if ((i + j) % 2 == 0) {
        cells.push_back({a, b, c});
        cells.push_back({a, c, d});
      } else {
        cells.push_back({a, b, d});
        cells.push_back({b, c, d});
      }
    }
  return SimplicialComplex::build(std::move(vertices), std::move(cells));
}

SimplicialComplex unit_cube_kuhn(int n) {
  if (n < 1) throw MeshError("need n >= 1");
  std::vector<Eigen::VectorXd> vertices;
  auto vid = [n](int i, int j, int k) { return (k * (n + 1) + j) * (n + 1) + i; };
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) {
        Eigen::VectorXd x(3);
        x << double(i) / n, double(j) / n, double(k) / n;
        vertices.push_back(x);
      }
  const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  std::vector<std::vector<int>> cells;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (const auto& p : perms) {
          int corner[3] = {i, j, k};
          std::vector<int> tet;
          tet.push_back(vid(corner[0], corner[1], corner[2]));
          for (int step = 0; step < 3; ++step) {
            corner[p[step]] += 1;
            tet.push_back(vid(corner[0], corner[1], corner[2]));
          }
          cells.push_back(tet);
        }
  return SimplicialComplex::build(std::move(vertices), std::move(cells));
}

}  // namespace feec
