#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "feec/fe_space.hpp"
#include "helpers.hpp"

using namespace feec;
using namespace feec::testing;

namespace {

SimplicialComplex unit_triangle() {
  std::vector<Eigen::VectorXd> v(3, Eigen::VectorXd(2));
  v[0] << 0, 0;
  v[1] << 1, 0;
  v[2] << 0, 1;
  return SimplicialComplex::build(v, {{0, 1, 2}});
}

Eigen::VectorXd random_coeffs(std::mt19937_64& gen, int dim) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd c(dim);
  for (int i = 0; i < dim; ++i) c[i] = dist(gen);
  return c;
}

// wraps an FE coefficient vector as a black-box sampled form
SampledForm as_sampled(const GlobalSpace& space, const Eigen::VectorXd& coeffs,
                       int quad_degree) {
  SampledForm u;
  u.k = space.k();
  u.quad_degree = quad_degree;
  u.value = [&space, coeffs](int cell, const Eigen::VectorXd& x) {
    return space.evaluate(coeffs, cell,
                          space.cell_geometry(cell).barycentric(x));
  };
  u.dvalue = [&space, coeffs](int cell, const Eigen::VectorXd& x) {
    return space.evaluate_d(coeffs, cell,
                            space.cell_geometry(cell).barycentric(x));
  };
  return u;
}

}  // namespace

TEST_CASE("spec sequences") {
  auto minus = SpecSequence::minus_uniform(2, 2);
  CHECK(minus.name() == "P2-,P2-,P2-");
  auto full = SpecSequence::full_led(2, 3);
  CHECK(full.name() == "P2,P1,P1-,P1-");
  auto mixed = SpecSequence::parse("P2,P2-,P1", 2);
  CHECK(mixed[1].family == Family::Minus);
  CHECK_THROWS_AS(SpecSequence::parse("P2,P2,P2", 2), IncompatibleSpecError);
  CHECK_THROWS_AS(SpecSequence::parse("P1,P3-,P1", 2), IncompatibleSpecError);
}

TEST_CASE("global dimensions") {
  auto mesh = unit_square_crisscross(2);
  GlobalSpace whitney1(mesh, {1, 1, Family::Minus});
  CHECK(whitney1.dim() == 16);  // one dof per edge
  for (int k = 0; k <= 2; ++k)
    CHECK(GlobalSpace(mesh, {k, 1, Family::Minus}).dim() == mesh.num_subsimplices(k));

  auto tri = unit_triangle();
  CHECK(GlobalSpace(tri, {0, 1, Family::Full}).dim() == 3);
  CHECK(GlobalSpace(tri, {0, 2, Family::Full}).dim() == 6);
  CHECK(GlobalSpace(tri, {1, 2, Family::Minus}).dim() == 8);
  CHECK(GlobalSpace(tri, {1, 2, Family::Full}).dim() == 12);
}

TEST_CASE("unisolvence: dofs recover coefficients") {
  auto gen = rng(42);
  auto mesh = unit_square_crisscross(2);
  for (FormSpaceSpec spec : {FormSpaceSpec{0, 2, Family::Full},
                             FormSpaceSpec{1, 2, Family::Minus},
                             FormSpaceSpec{1, 1, Family::Full},
                             FormSpaceSpec{2, 1, Family::Minus}}) {
    GlobalSpace space(mesh, spec);
    Eigen::VectorXd c = random_coeffs(gen, space.dim());
    // materialize the fe form per cell and re-apply the dof functionals
    auto cellwise = [&](int cell) {
      const auto& dofs = space.cell_dofs(cell);
      PolyForm u = PolyForm::zero(mesh.dim(), spec.k);
      for (size_t i = 0; i < dofs.size(); ++i) {
        PolyForm nodal = space.nodal_form(cell, static_cast<int>(i));
        u = u + nodal.scaled(c[dofs[i]]);
      }
      return u;
    };
    Eigen::VectorXd recovered = dof_interpolate(space, cellwise);
    CHECK((recovered - c).norm() <= 1e-10 * std::max(1.0, c.norm()));
  }
}

TEST_CASE("conformity of traces across shared faces") {
  auto gen = rng(7);
  for (auto mesh : {unit_square_crisscross(2)}) {
    const int n = mesh.dim();
    for (FormSpaceSpec spec : {FormSpaceSpec{0, 2, Family::Full},
                               FormSpaceSpec{1, 1, Family::Minus},
                               FormSpaceSpec{1, 2, Family::Full}}) {
      GlobalSpace space(mesh, spec);
      Eigen::VectorXd c = random_coeffs(gen, space.dim());
      for (int f = 0; f < mesh.num_subsimplices(n - 1); ++f) {
        const auto& cof = mesh.subsimplex(n - 1, f).cofaces;
        if (cof.size() != 2) continue;
        SimplexGeometry fg(mesh.sub_coords(n - 1, f));
        // tangent frame of the face
        std::vector<Eigen::VectorXd> tang;
        for (int i = 1; i < n; ++i)
          tang.push_back(fg.coords().col(i) - fg.coords().col(0));
        for (int t = 0; t < 4; ++t) {
          Eigen::VectorXd mu = random_bary(gen, n - 1);
          Eigen::VectorXd x = fg.point(mu);
          double v0 = apply_form(
              space.evaluate(c, cof[0], space.cell_geometry(cof[0]).barycentric(x)),
              spec.k, {tang.begin(), tang.begin() + spec.k}, n);
          double v1 = apply_form(
              space.evaluate(c, cof[1], space.cell_geometry(cof[1]).barycentric(x)),
              spec.k, {tang.begin(), tang.begin() + spec.k}, n);
          CHECK(std::abs(v0 - v1) <= 1e-11 * std::max(1.0, std::abs(v0)));
        }
      }
    }
  }
}

TEST_CASE("discrete complex: d matrices") {
  auto tri = unit_triangle();
  GlobalSpace p1l0(tri, {0, 1, Family::Full});
  GlobalSpace w1(tri, {1, 1, Family::Minus});
  Eigen::MatrixXd D = Eigen::MatrixXd(d_matrix(p1l0, w1));
  // coefficients of d(hat_i) in the Whitney edge basis are +-1 incidence
  for (int e = 0; e < 3; ++e) {
    const auto& ev = tri.subsimplex(1, e).vertices;
    for (int v = 0; v < 3; ++v) {
      double expect = 0;
      if (tri.subsimplex(0, v).vertices[0] == ev[1]) expect = 1;
      if (tri.subsimplex(0, v).vertices[0] == ev[0]) expect = -1;
      CHECK(D(e, v) == doctest::Approx(expect).epsilon(1e-13));
    }
  }

  // d compose d vanishes on a refined mesh at r = 2
  auto mesh = unit_square_crisscross(2);
  auto seq = SpecSequence::parse("P2,P2-,P1", 2);
  GlobalSpace x0(mesh, seq[0]), x1(mesh, seq[1]), x2(mesh, seq[2]);
  Eigen::SparseMatrix<double> d0 = d_matrix(x0, x1), d1 = d_matrix(x1, x2);
  Eigen::SparseMatrix<double> dd = d1 * d0;
  double rel = dd.norm() / std::max(1.0, d0.norm() * d1.norm());
  CHECK(rel <= 1e-13);

  // constants are killed: all-ones coefficients of P1 Lambda^0
  GlobalSpace p1(mesh, {0, 1, Family::Full});
  GlobalSpace w(mesh, {1, 1, Family::Minus});
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(p1.dim());
  CHECK((d_matrix(p1, w) * ones).norm() <= 1e-13);

  // rank-nullity along the complex on a contractible domain
  Eigen::MatrixXd D0 = Eigen::MatrixXd(d0), D1 = Eigen::MatrixXd(d1);
  Eigen::FullPivLU<Eigen::MatrixXd> lu0(D0), lu1(D1);
  lu0.setThreshold(1e-9);
  lu1.setThreshold(1e-9);
  CHECK(x0.dim() - lu0.rank() == 1);                       // kernel = constants
  CHECK(x1.dim() - lu1.rank() == lu0.rank());              // ker d1 = im d0
  CHECK(lu1.rank() == x2.dim());                           // onto at the top
}

TEST_CASE("nested space embeddings") {
  auto gen = rng(11);
  auto mesh = unit_square_crisscross(2);
  GlobalSpace wsp(mesh, {1, 1, Family::Minus});
  GlobalSpace p1(mesh, {1, 1, Family::Full});
  GlobalSpace p2m(mesh, {1, 2, Family::Minus});
  Eigen::VectorXd c = random_coeffs(gen, wsp.dim());

  auto embed = [&](const GlobalSpace& from, const Eigen::VectorXd& cf,
                   const GlobalSpace& to) {
    return dof_interpolate(to, [&](int cell) {
      const auto& dofs = from.cell_dofs(cell);
      PolyForm u = PolyForm::zero(mesh.dim(), from.k());
      for (size_t i = 0; i < dofs.size(); ++i)
        u = u + from.nodal_form(cell, static_cast<int>(i)).scaled(cf[dofs[i]]);
      return u;
    });
  };
  Eigen::VectorXd c1 = embed(wsp, c, p1);
  Eigen::VectorXd c2 = embed(p1, c1, p2m);
  for (int t = 0; t < 10; ++t) {
    int cell = t % mesh.num_cells();
    Eigen::VectorXd b = random_bary(gen, 2);
    Eigen::VectorXd v0 = wsp.evaluate(c, cell, b);
    CHECK((p1.evaluate(c1, cell, b) - v0).norm() <= 1e-12);
    CHECK((p2m.evaluate(c2, cell, b) - v0).norm() <= 1e-12);
  }
}

TEST_CASE("patch restriction and constrained subspaces") {
  auto mesh = unit_square_crisscross(2);
  int center = -1;
  for (int v = 0; v < mesh.num_vertices(); ++v)
    if ((mesh.vertex(v) - (Eigen::VectorXd(2) << 0.5, 0.5).finished()).norm() < 1e-12)
      center = v;
  GlobalSpace p1(mesh, {0, 1, Family::Full});
  Patch star = mesh.macro_patch(0, mesh.subsimplex_id(0, {center}));
  PatchSpace ps = restrict_to_patch(p1, star);
  CHECK(ps.dim() == static_cast<int>(star.subs[0].size()));

  // zero-boundary subspace of the star: only the center vertex survives
  SubspaceFilter f;
  f.boundary = BoundaryCondition::Full;
  auto zb = constrained_subspace(ps, f);
  CHECK(zb.dim() == 1);

  // restriction then prolongation by zero reproduces patch values
  auto gen = rng(3);
  Eigen::VectorXd c = random_coeffs(gen, p1.dim());
  Eigen::VectorXd local = ps.restrict_coeffs(c);
  Eigen::VectorXd back = Eigen::VectorXd::Zero(p1.dim());
  ps.scatter_add(local, back);
  for (int d = 0; d < p1.dim(); ++d) {
    if (ps.local_of(d) >= 0)
      CHECK(back[d] == doctest::Approx(c[d]));
    else
      CHECK(back[d] == 0.0);
  }

  // breve subspace at dim f == k has codimension one in the patch space
  GlobalSpace p2(mesh, {1, 2, Family::Minus});
  int edge = star.subs[1][0];
  Patch ep = mesh.macro_patch(1, edge);
  PatchSpace eps = restrict_to_patch(p2, ep);
  SubspaceFilter fb;
  fb.breve = true;
  fb.anchor_dim = 1;
  fb.anchor_id = edge;
  CHECK(constrained_subspace(eps, fb).dim() == eps.dim() - 1);

  // trace kernel on a zero-boundary space of an edge patch: manual count
  GlobalSpace scalars(mesh, {0, 2, Family::Full});
  PatchSpace sps = restrict_to_patch(scalars, ep);
  SubspaceFilter fk;
  fk.boundary = BoundaryCondition::Full;
  fk.trace_kernel = true;
  fk.anchor_dim = 1;
  fk.anchor_id = edge;
  auto ker = constrained_subspace(sps, fk);
  int manual = 0;
  for (int d : ker.columns) {
    (void)d;
    ++manual;
  }
  // oracle: count dofs not on the patch boundary and not on the edge closure
  int expect = 0;
  for (int m = 0; m <= 2; ++m)
    for (int id : ep.subs[m]) {
      if (ep.sub_on_patch_boundary(m, id)) continue;
      const auto& sv = mesh.subsimplex(m, id).vertices;
      const auto& evv = mesh.subsimplex(1, edge).vertices;
      if (std::includes(evv.begin(), evv.end(), sv.begin(), sv.end())) continue;
      int b = scalars.block_of(m, id);
      if (b >= 0) expect += scalars.block(b).size();
    }
  CHECK(manual == expect);
}

TEST_CASE("sampled moments against exact assembly") {
  auto gen = rng(13);
  auto mesh = unit_square_crisscross(2);
  GlobalSpace x1(mesh, {1, 2, Family::Minus});
  GlobalSpace w1(mesh, {1, 1, Family::Minus});
  Eigen::VectorXd c = random_coeffs(gen, x1.dim());
  SampledForm u = as_sampled(x1, c, 8);

  GlobalSpace wtop(mesh, {1, 1, Family::Minus});
  SampledMoments mom = sampled_moments(x1, u, &wtop);

  // oracle: exact element matrices
  for (int cell = 0; cell < mesh.num_cells(); ++cell) {
    const auto& dofs = x1.cell_dofs(cell);
    Eigen::VectorXd local(dofs.size());
    for (size_t i = 0; i < dofs.size(); ++i) local[i] = c[dofs[i]];
    Eigen::VectorXd exact_mass = x1.cell_mass(cell) * local;
    Eigen::VectorXd exact_stiff = x1.cell_stiffness(cell) * local;
    CHECK((mom.mass[cell] - exact_mass).norm() <= 1e-12 * std::max(1.0, exact_mass.norm()));
    CHECK((mom.stiff[cell] - exact_stiff).norm() <=
          1e-12 * std::max(1.0, exact_stiff.norm()));
  }

  // constant form: stiffness moments vanish
  GlobalSpace p1(mesh, {0, 1, Family::Full});
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(p1.dim());
  SampledForm cst = as_sampled(p1, ones, 6);
  SampledMoments cm = sampled_moments(p1, cst);
  for (int cell = 0; cell < mesh.num_cells(); ++cell)
    CHECK(cm.stiff[cell].norm() <= 1e-13);

  // quadrature refinement: moments of a trigonometric field converge
  SampledForm trig;
  trig.k = 0;
  trig.value = [](int, const Eigen::VectorXd& x) {
    Eigen::VectorXd v(1);
    v << std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]);
    return v;
  };
  trig.dvalue = [](int, const Eigen::VectorXd& x) {
    Eigen::VectorXd v(2);
    v << M_PI * std::cos(M_PI * x[0]) * std::sin(M_PI * x[1]),
        M_PI * std::sin(M_PI * x[0]) * std::cos(M_PI * x[1]);
    return v;
  };
  double prev = 1.0;
  Eigen::VectorXd ref;
  {
    trig.quad_degree = 20;
    SampledMoments m20 = sampled_moments(p1, trig);
    ref = m20.mass[0];
  }
  for (int deg : {4, 8, 12}) {
    trig.quad_degree = deg;
    SampledMoments m = sampled_moments(p1, trig);
    double err = (m.mass[0] - ref).norm();
    CHECK(err <= prev + 1e-15);
    prev = err;
  }
  CHECK(prev <= 1e-10);
}

TEST_CASE("fe form serialization") {
  auto gen = rng(17);
  auto mesh = unit_square_crisscross(2);
  GlobalSpace space(mesh, {1, 2, Family::Full});
  FEForm u{&space, random_coeffs(gen, space.dim())};
  nlohmann::json j = u.to_json();
  FEForm v = FEForm::from_json(j, space);
  CHECK((u.coeffs - v.coeffs).norm() == 0.0);
  CHECK(j["spec"]["family"] == "full");
}
