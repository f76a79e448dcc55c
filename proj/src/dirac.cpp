#include "wdirac/dirac.hpp"

#include <cmath>

#include "wdirac/quadrature.hpp"

namespace wdirac {

void PerturbationSpec::validate(const PeriodicMesh& mesh) const {
  require(std::isfinite(mass) && mass >= 0.0, "perturbation: mass must be finite and >= 0");
  require(std::isfinite(shift), "perturbation: shift must be finite");
  if (potential) {
    require(potential_quad_order >= 2, "perturbation: potential quadrature order must be >= 2");
    // bounded on a coarse sample grid; a smooth catalog field that misbehaves
    // here is a caller bug worth failing loudly on
    const int probes = 5;
    for (int i = 0; i < probes; ++i)
      for (int j = 0; j < probes; ++j)
        for (int l = 0; l < probes; ++l) {
          const std::array<double, 3> x{mesh.lattice().lengths[0] * i / probes,
                                        mesh.lattice().lengths[1] * j / probes,
                                        mesh.lattice().lengths[2] * l / probes};
          require(std::isfinite(potential(x)), "perturbation: potential unbounded on samples");
        }
  }
}

BlockOperator assemble_dirac_form(const DeRhamComplex& rc) {
  BlockOperator op;
  op.complex = rc.shared();
  op.matrix = SymmetricMatrix(std::size_t(rc.total_dof_count()));
  for (int k = 0; k + 1 <= rc.dim(); ++k) {
    const int row_off = rc.graded_offset(k + 1);
    const int col_off = rc.graded_offset(k);
    // rows of d_k as index/value slices for the sparse product M_{k+1} d_k
    std::vector<std::vector<std::pair<int, double>>> d_rows(std::size_t(rc.dof_count(k + 1)));
    rc.coboundary_real(k).for_each(
        [&](int r, int c, double v) { d_rows[std::size_t(r)].push_back({c, v}); });
    rc.mass(k + 1).for_each([&](int i, int l, double mv) {
      for (const auto& [j, dv] : d_rows[std::size_t(l)])
        op.matrix.lower(std::size_t(row_off + i), std::size_t(col_off + j)) += mv * dv;
    });
  }
  return op;
}

BlockOperator graded_mass(const DeRhamComplex& rc) {
  BlockOperator op;
  op.complex = rc.shared();
  op.matrix = SymmetricMatrix(std::size_t(rc.total_dof_count()));
  for (int k = 0; k <= rc.dim(); ++k) {
    const int off = rc.graded_offset(k);
    rc.mass(k).for_each([&](int i, int j, double v) {
      if (i >= j) op.matrix.lower(std::size_t(off + i), std::size_t(off + j)) = v;
    });
  }
  return op;
}

Vector parity_signs(const DeRhamComplex& rc) {
  Vector s(std::size_t(rc.total_dof_count()), 1.0);
  for (int k = 1; k <= rc.dim(); k += 2)
    for (int i = rc.graded_offset(k); i < rc.graded_offset(k + 1); ++i)
      s[std::size_t(i)] = -1.0;
  return s;
}

BlockOperator parity_mass(const DeRhamComplex& rc) {
  BlockOperator op = graded_mass(rc);
  for (int k = 1; k <= rc.dim(); k += 2) {
    const int off = rc.graded_offset(k);
    for (int i = off; i < rc.graded_offset(k + 1); ++i)
      for (int j = off; j <= i; ++j) {
        double& v = op.matrix.lower(std::size_t(i), std::size_t(j));
        v = -v;
      }
  }
  return op;
}

BlockOperator potential_term(const DeRhamComplex& rc,
                             const std::function<double(const std::array<double, 3>&)>& v,
                             int quad_order) {
  require(static_cast<bool>(v), "potential_term: empty potential");
  require(quad_order >= 2, "potential_term: quadrature order must be >= 2");
  const PeriodicMesh& mesh = rc.mesh();
  const int n = mesh.dim();
  const double fact = n == 1 ? 1.0 : (n == 2 ? 2.0 : 6.0);
  const QuadRule rule = simplex_rule(n, quad_order);

  BlockOperator op;
  op.complex = rc.shared();
  op.matrix = SymmetricMatrix(std::size_t(rc.total_dof_count()));

  std::vector<double> phi;
  std::vector<double> local;
  for (int c = 0; c < mesh.count(n); ++c) {
    const double* q = mesh.coords(n, c);
    const double cell_scale = fact * mesh.measure(n, c);
    for (int k = 0; k <= n; ++k) {
      const int nfaces = int(ascending_subsets(n + 1, k + 1).size());
      const int ncomp = form_component_count(n, k);
      phi.assign(std::size_t(nfaces) * ncomp, 0.0);
      local.assign(std::size_t(nfaces) * nfaces, 0.0);
      for (std::size_t p = 0; p < rule.size(); ++p) {
        std::array<double, 4> lambda{0.0, 0.0, 0.0, 0.0};
        std::array<double, 3> x{0.0, 0.0, 0.0};
        double rest = 1.0;
        for (int r = 0; r < n; ++r) {
          lambda[std::size_t(r) + 1] = rule.points[p][r];
          rest -= rule.points[p][r];
        }
        lambda[0] = rest;
        for (int a = 0; a < n; ++a) {
          double xa = 0.0;
          for (int vert = 0; vert <= n; ++vert)
            xa += lambda[std::size_t(vert)] * q[std::size_t(vert) * n + a];
          x[std::size_t(a)] = xa;
        }
        rc.basis_values(k, c, lambda, phi.data());
        const double wv = rule.weights[p] * v(x);
        for (int f1 = 0; f1 < nfaces; ++f1)
          for (int f2 = 0; f2 <= f1; ++f2) {
            double dotv = 0.0;
            for (int ci = 0; ci < ncomp; ++ci)
              dotv += phi[std::size_t(f1) * ncomp + ci] * phi[std::size_t(f2) * ncomp + ci];
            local[std::size_t(f1) * nfaces + f2] += wv * dotv;
          }
      }
      const int off = rc.graded_offset(k);
      for (int f1 = 0; f1 < nfaces; ++f1) {
        const int g1 = off + mesh.cell_face(c, k, f1);
        for (int f2 = 0; f2 <= f1; ++f2) {
          const int g2 = off + mesh.cell_face(c, k, f2);
          const double contrib = local[std::size_t(f1) * nfaces + f2] * cell_scale;
          if (g1 >= g2)
            op.matrix.lower(std::size_t(g1), std::size_t(g2)) += contrib;
          else
            op.matrix.lower(std::size_t(g2), std::size_t(g1)) += contrib;
        }
      }
    }
  }
  return op;
}

BlockOperator perturbed_operator(const BlockOperator& a, const BlockOperator& m,
                                 const PerturbationSpec& spec) {
  require(a.complex && m.complex && a.complex.get() == m.complex.get(),
          "perturbed_operator: operators from different complexes");
  const DeRhamComplex& rc = *a.complex;
  spec.validate(rc.mesh());
  BlockOperator out;
  out.complex = a.complex;
  out.matrix = a.matrix;
  if (spec.mass != 0.0) {
    BlockOperator eps = parity_mass(rc);
    out.matrix.add_scaled(eps.matrix, spec.mass);
  }
  if (spec.potential) {
    BlockOperator c = potential_term(rc, spec.potential, spec.potential_quad_order);
    out.matrix.add_scaled(c.matrix, 1.0);
  }
  if (spec.shift != 0.0) out.matrix.add_scaled(m.matrix, spec.shift);
  return out;
}

}  // namespace wdirac
