#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "feec/simplicial_mesh.hpp"

using namespace feec;

namespace {

SimplicialComplex unit_triangle() {
  std::vector<Eigen::VectorXd> v(3, Eigen::VectorXd(2));
  v[0] << 0, 0;
  v[1] << 1, 0;
  v[2] << 0, 1;
  return SimplicialComplex::build(v, {{0, 1, 2}});
}

// ring of 8 triangles around a missing center square
SimplicialComplex annulus() {
  std::vector<Eigen::VectorXd> v(8, Eigen::VectorXd(2));
  v[0] << 0, 0;
  v[1] << 3, 0;
  v[2] << 3, 3;
  v[3] << 0, 3;
  v[4] << 1, 1;
  v[5] << 2, 1;
  v[6] << 2, 2;
  v[7] << 1, 2;
  std::vector<std::vector<int>> cells = {{0, 1, 5}, {0, 4, 5}, {1, 2, 5}, {2, 5, 6},
                                         {2, 3, 6}, {3, 6, 7}, {0, 3, 7}, {0, 4, 7}};
  return SimplicialComplex::build(v, cells);
}

}  // namespace

TEST_CASE("subsimplex tables") {
  auto tri = unit_triangle();
  CHECK(tri.num_subsimplices(0) == 3);
  CHECK(tri.num_subsimplices(1) == 3);
  CHECK(tri.num_subsimplices(2) == 1);

  auto mesh = unit_square_crisscross(2);
  CHECK(mesh.num_cells() == 8);
  CHECK(mesh.num_vertices() == 9);
  // brute-force recount of the edges from the cells
  std::set<std::pair<int, int>> edges;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& vs = mesh.subsimplex(2, c).vertices;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) edges.insert({vs[i], vs[j]});
  }
  CHECK(edges.size() == 16);
  CHECK(mesh.num_subsimplices(1) == 16);

  CHECK(unit_square_crisscross(4).num_cells() == 32);
  CHECK(unit_square_crisscross(8).num_cells() == 128);
}

TEST_CASE("build failures") {
  std::vector<Eigen::VectorXd> v(3, Eigen::VectorXd(2));
  v[0] << 0, 0;
  v[1] << 1, 1;
  v[2] << 2, 2;  // collinear
  CHECK_THROWS_AS(SimplicialComplex::build(v, {{0, 1, 2}}), DegenerateCellError);

  std::vector<Eigen::VectorXd> w(4, Eigen::VectorXd(2));
  w[0] << 0, 0;
  w[1] << 1, 0;
  w[2] << 0, 1;
  w[3] << 1, 1;
  CHECK_THROWS_AS(SimplicialComplex::build(w, {{0, 1, 2}, {2, 1, 0}}), DuplicateCellError);
}

TEST_CASE("boundary operator and signs") {
  auto mesh = unit_square_crisscross(2);
  int e = mesh.subsimplex_id(1, {0, 1});
  auto faces = mesh.subsimplex_boundary(1, e);
  CHECK(faces[0].first == mesh.subsimplex_id(0, {1}));
  CHECK(faces[0].second == 1);
  CHECK(faces[1].first == mesh.subsimplex_id(0, {0}));
  CHECK(faces[1].second == -1);

  auto kuhn = unit_cube_kuhn(1);
  CHECK(kuhn.num_cells() == 6);
  CHECK(kuhn.num_vertices() == 8);
  // signs of a triangle boundary are (+,-,+)
  auto tfaces = kuhn.subsimplex_boundary(2, 0);
  CHECK(tfaces[0].second == 1);
  CHECK(tfaces[1].second == -1);
  CHECK(tfaces[2].second == 1);

  // dd = 0 on chains, exactly in integer arithmetic
  for (int m = 2; m <= kuhn.dim(); ++m)
    for (int id = 0; id < kuhn.num_subsimplices(m); ++id) {
      std::map<int, int> acc;
      for (auto [f, s] : kuhn.subsimplex_boundary(m, id))
        for (auto [g, t] : kuhn.subsimplex_boundary(m - 1, f)) acc[g] += s * t;
      for (auto [g, total] : acc) CHECK(total == 0);
    }
}

TEST_CASE("macroelement patches") {
  auto mesh = unit_square_crisscross(2);
  int center = -1;
  for (int v = 0; v < mesh.num_vertices(); ++v)
    if ((mesh.vertex(v) - (Eigen::VectorXd(2) << 0.5, 0.5).finished()).norm() < 1e-12)
      center = v;
  REQUIRE(center >= 0);
  int cid = mesh.subsimplex_id(0, {center});

  Patch star = mesh.macro_patch(0, cid);
  std::set<int> expect;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& vs = mesh.subsimplex(2, c).vertices;
    if (std::count(vs.begin(), vs.end(), center)) expect.insert(c);
  }
  CHECK(std::set<int>(star.cells.begin(), star.cells.end()) == expect);
  CHECK(verify_patch_contractible(mesh, star));

  // extended patch of a vertex equals the macro patch
  Patch ext = mesh.extended_patch(0, cid);
  CHECK(ext.cells == star.cells);

  // extended patch of an edge is the union of the vertex macroelements
  for (int e = 0; e < mesh.num_subsimplices(1); ++e) {
    const auto& ev = mesh.subsimplex(1, e).vertices;
    Patch pe = mesh.extended_patch(1, e);
    std::set<int> un;
    for (int v : ev) {
      Patch pv = mesh.macro_patch(0, mesh.subsimplex_id(0, {v}));
      un.insert(pv.cells.begin(), pv.cells.end());
    }
    CHECK(std::set<int>(pe.cells.begin(), pe.cells.end()) == un);

    // monotonicity against both vertices
    Patch me = mesh.macro_patch(1, e);
    for (int v : ev) {
      Patch pv = mesh.macro_patch(0, mesh.subsimplex_id(0, {v}));
      for (int c : me.cells) CHECK(std::count(pv.cells.begin(), pv.cells.end(), c) == 1);
      Patch pve = mesh.extended_patch(0, mesh.subsimplex_id(0, {v}));
      for (int c : pve.cells) CHECK(std::count(pe.cells.begin(), pe.cells.end(), c) == 1);
    }
  }
}

TEST_CASE("locality domains") {
  auto mesh = unit_square_crisscross(2);
  for (int T = 0; T < mesh.num_cells(); ++T) {
    auto d0 = mesh.locality_domain(T, 0);
    Patch p = mesh.extended_patch(2, T);
    CHECK(d0.cells == p.cells);
    auto d1 = mesh.locality_domain(T, 1);
    auto d2 = mesh.locality_domain(T, 2);
    CHECK(d0.cells.size() <= d1.cells.size());
    CHECK(d1.cells.size() <= d2.cells.size());
    for (int c : d0.cells) CHECK(std::binary_search(d2.cells.begin(), d2.cells.end(), c));
    CHECK(std::binary_search(d0.cells.begin(), d0.cells.end(), T));
  }

  auto tri = unit_triangle();
  for (int m = 0; m <= 2; ++m) {
    auto dom = tri.locality_domain(0, m);
    CHECK(dom.cells == std::vector<int>{0});
  }
}

TEST_CASE("contractibility check") {
  auto tri = unit_triangle();
  CHECK(verify_patch_contractible(tri, tri.patch_from_cells({0})));

  auto ring = annulus();
  Patch whole = ring.patch_from_cells({0, 1, 2, 3, 4, 5, 6, 7});
  CHECK_FALSE(verify_patch_contractible(ring, whole));

  auto kuhn = unit_cube_kuhn(2);
  // a vertex star in the cube mesh
  Patch star = kuhn.macro_patch(0, kuhn.num_vertices() / 2);
  CHECK(verify_patch_contractible(kuhn, star));
}

TEST_CASE("bounded overlap under refinement") {
  int o2 = unit_square_crisscross(2).max_patch_overlap();
  int o4 = unit_square_crisscross(4).max_patch_overlap();
  int o8 = unit_square_crisscross(8).max_patch_overlap();
  CHECK(o4 <= o2 * 2);
  CHECK(o8 <= o4);
}

TEST_CASE("mesh io and geometry") {
  nlohmann::json j = {{"dim", 2},
                      {"vertices", {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}}},
                      {"cells", {{0, 1, 2}, {1, 2, 3}}}};
  auto mesh = SimplicialComplex::from_json(j);
  CHECK(mesh.num_cells() == 2);
  CHECK(mesh.cell_volume(0) == doctest::Approx(0.5));
  CHECK(mesh.shape_regularity() < 1e3);

  auto kuhn = unit_cube_kuhn(2);
  CHECK(kuhn.num_cells() == 48);
  double vol = 0;
  for (int c = 0; c < kuhn.num_cells(); ++c) vol += kuhn.cell_volume(c);
  CHECK(vol == doctest::Approx(1.0).epsilon(1e-12));
}
