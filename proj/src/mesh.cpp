#include "wdirac/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wdirac {

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

const std::vector<std::array<int, 4>>& ascending_subsets(int n_elems, int size) {
  static std::map<std::pair<int, int>, std::vector<std::array<int, 4>>> cache;
  auto key = std::make_pair(n_elems, size);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<std::array<int, 4>> subsets;
  std::vector<int> idx(size);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    std::array<int, 4> s{-1, -1, -1, -1};
    for (int i = 0; i < size; ++i) s[i] = idx[i];
    subsets.push_back(s);
    int i = size - 1;
    while (i >= 0 && idx[i] == n_elems - size + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
  }
  return cache.emplace(key, std::move(subsets)).first->second;
}

void Lattice::validate() const {
  require(dim >= 1 && dim <= 3, "lattice: dim must be 1, 2 or 3");
  require(subdivisions >= 3, "lattice: need at least 3 subdivisions per axis");
  for (int a = 0; a < dim; ++a) require(lengths[a] > 0.0, "lattice: lengths must be positive");
}

std::shared_ptr<const PeriodicMesh> PeriodicMesh::build(const Lattice& lattice) {
  lattice.validate();
  auto mesh = std::shared_ptr<PeriodicMesh>(new PeriodicMesh());
  mesh->lattice_ = lattice;
  mesh->build_cells();
  mesh->build_faces();
  mesh->build_geometry();
  return mesh;
}

void PeriodicMesh::build_cells() {
  const int n = lattice_.dim, m = lattice_.subdivisions;
  int n_cubes = 1;
  for (int a = 0; a < n; ++a) n_cubes *= m;

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    perms_.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  const int n_perms = int(perms_.size());

  simplices_.assign(n + 1, {});
  coords_.assign(n + 1, {});
  measure_.assign(n + 1, {});
  diameter_.assign(n + 1, {});
  index_.assign(n + 1, {});
  boundary_.resize(n + 1);
  boundary_built_.assign(n + 1, false);

  // vertices: lattice points, axis 0 fastest
  const int n_verts = n_cubes;
  for (int v = 0; v < n_verts; ++v) {
    Simplex s;
    s.v[0] = v;
    simplices_[0].push_back(s);
    index_[0][s.v] = v;
    const auto x = vertex_coord(v);
    coords_[0].push_back({x[0], x[1], x[2]});
    measure_[0].push_back(1.0);
    diameter_[0].push_back(0.0);
  }

  cube_cells_.assign(std::size_t(n_cubes) * n_perms, -1);
  for (int cube = 0; cube < n_cubes; ++cube) {
    std::array<int, 3> g{0, 0, 0};
    int rem = cube;
    for (int a = 0; a < n; ++a) {
      g[a] = rem % m;
      rem /= m;
    }
    for (int pi = 0; pi < n_perms; ++pi) {
      // chain through the cube along the permutation axes
      std::array<int, 4> ids{};
      std::array<std::array<double, 3>, 4> pos{};
      std::array<int, 3> off{0, 0, 0};
      for (int j = 0; j <= n; ++j) {
        int id = 0, stride = 1;
        for (int a = 0; a < n; ++a) {
          id += ((g[a] + off[a]) % m) * stride;
          stride *= m;
        }
        ids[j] = id;
        for (int a = 0; a < n; ++a) pos[j][a] = (g[a] + off[a]) * lattice_.cell_width(a);
        if (j < n) off[perms_[pi][j]] += 1;
      }
      std::array<int, 4> order{0, 1, 2, 3};
      std::sort(order.begin(), order.begin() + n + 1,
                [&](int a, int b) { return ids[a] < ids[b]; });
      Simplex cell;
      std::vector<double> cc(std::size_t(n + 1) * n);
      std::array<int, 4> g2s{-1, -1, -1, -1};
      for (int j = 0; j <= n; ++j) {
        cell.v[j] = ids[order[j]];
        g2s[order[j]] = j;
        for (int a = 0; a < n; ++a) cc[std::size_t(j) * n + a] = pos[order[j]][a];
      }
      const int id = int(simplices_[n].size());
      auto [it, fresh] = index_[n].emplace(cell.v, id);
      (void)it;
      if (!fresh) throw NumericalFailure("mesh: duplicate top cell tuple");
      simplices_[n].push_back(cell);
      coords_[n].push_back(std::move(cc));
      gen_to_sorted_.push_back(g2s);
      cube_cells_[std::size_t(cube) * n_perms + pi] = id;
    }
  }
}

void PeriodicMesh::build_faces() {
  const int n = lattice_.dim;
  const int n_cells = count(n);
  cell_faces_.assign(n + 1, {});
  for (int k = 0; k <= n; ++k) cell_faces_[k].resize(n_cells);
  std::vector<std::vector<int>> facet_cells;

  for (int cell = 0; cell < n_cells; ++cell) {
    const Simplex& top = simplices_[n][cell];
    const double* cc = coords_[n][cell].data();
    for (int k = 0; k <= n; ++k) {
      const auto& subsets = ascending_subsets(n + 1, k + 1);
      cell_faces_[k][cell].reserve(subsets.size());
      for (const auto& sub : subsets) {
        std::array<int, 4> tup{-1, -1, -1, -1};
        for (int j = 0; j <= k; ++j) tup[j] = top.v[sub[j]];
        int id;
        auto it = index_[k].find(tup);
        if (it == index_[k].end()) {
          id = int(simplices_[k].size());
          index_[k][tup] = id;
          Simplex s;
          s.v = tup;
          simplices_[k].push_back(s);
          std::vector<double> fc(std::size_t(k + 1) * n);
          for (int j = 0; j <= k; ++j)
            for (int a = 0; a < n; ++a) fc[std::size_t(j) * n + a] = cc[sub[j] * n + a];
          coords_[k].push_back(std::move(fc));
        } else {
          id = it->second;
          // shared face: representatives must agree up to one translation
          const double* stored = coords_[k][id].data();
          double shift[3];
          for (int a = 0; a < n; ++a) shift[a] = stored[a] - cc[sub[0] * n + a];
          for (int j = 0; j <= k; ++j)
            for (int a = 0; a < n; ++a) {
              const double d = stored[std::size_t(j) * n + a] - cc[sub[j] * n + a] - shift[a];
              if (std::fabs(d) > 1e-9 * lattice_.lengths[a])
                throw NumericalFailure("mesh: inconsistent face representatives");
            }
        }
        cell_faces_[k][cell].push_back(id);
        if (k == n - 1) {
          if (int(facet_cells.size()) <= id) facet_cells.resize(id + 1);
          facet_cells[id].push_back(cell);
        }
      }
    }
  }

  for (int f = 0; f < int(facet_cells.size()); ++f) {
    if (facet_cells[f].size() != 2)
      throw NumericalFailure("mesh: facet not shared by exactly two cells");
    const int a = facet_cells[f][0], b = facet_cells[f][1];
    facet_pairs_.push_back({f, std::min(a, b), std::max(a, b)});
  }

  // vertex-sharing neighborhoods
  std::vector<std::vector<int>> vertex_cells(count(0));
  for (int cell = 0; cell < n_cells; ++cell)
    for (int j = 0; j <= n; ++j) vertex_cells[simplices_[n][cell].v[j]].push_back(cell);
  neighbors_.resize(n_cells);
  for (int cell = 0; cell < n_cells; ++cell) {
    auto& nb = neighbors_[cell];
    for (int j = 0; j <= n; ++j) {
      const auto& vc = vertex_cells[simplices_[n][cell].v[j]];
      nb.insert(nb.end(), vc.begin(), vc.end());
    }
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
}

void PeriodicMesh::build_geometry() {
  const int n = lattice_.dim;
  // measures and diameters for every degree
  for (int k = 1; k <= n; ++k) {
    const int cnt = count(k);
    measure_[k].resize(cnt);
    diameter_[k].resize(cnt);
    for (int i = 0; i < cnt; ++i) {
      const double* c = coords_[k][i].data();
      double e[9] = {0};
      for (int j = 1; j <= k; ++j)
        for (int a = 0; a < n; ++a) e[(j - 1) * 3 + a] = c[std::size_t(j) * n + a] - c[a];
      double gram[9] = {0};
      for (int r = 0; r < k; ++r)
        for (int s = 0; s < k; ++s) {
          double acc = 0;
          for (int a = 0; a < n; ++a) acc += e[r * 3 + a] * e[s * 3 + a];
          gram[r * 3 + s] = acc;
        }
      double detg;
      if (k == 1)
        detg = gram[0];
      else if (k == 2)
        detg = gram[0] * gram[4] - gram[1] * gram[3];
      else
        detg = gram[0] * (gram[4] * gram[8] - gram[5] * gram[7]) -
               gram[1] * (gram[3] * gram[8] - gram[5] * gram[6]) +
               gram[2] * (gram[3] * gram[7] - gram[4] * gram[6]);
      double fact = 1.0;
      for (int j = 2; j <= k; ++j) fact *= j;
      measure_[k][i] = std::sqrt(std::max(detg, 0.0)) / fact;
      double diam = 0.0;
      for (int p = 0; p <= k; ++p)
        for (int q = p + 1; q <= k; ++q) {
          double d2 = 0.0;
          for (int a = 0; a < n; ++a) {
            const double d = c[std::size_t(p) * n + a] - c[std::size_t(q) * n + a];
            d2 += d * d;
          }
          diam = std::max(diam, std::sqrt(d2));
        }
      diameter_[k][i] = diam;
    }
  }

  const int n_cells = count(n);
  gradients_.assign(n_cells, {});
  orientation_.assign(n_cells, 0);
  width_ = 0.0;
  min_cell_width_ = 1e300;
  for (int cell = 0; cell < n_cells; ++cell) {
    const double* c = coords_[n][cell].data();
    double e[9] = {0};  // edge matrix, column j-1 = p_j - p_0
    for (int j = 1; j <= n; ++j)
      for (int a = 0; a < n; ++a) e[a * 3 + (j - 1)] = c[std::size_t(j) * n + a] - c[a];
    // invert by direct formulas; rows of the inverse are the gradients
    double det;
    double inv[9] = {0};
    if (n == 1) {
      det = e[0];
      inv[0] = 1.0 / det;
    } else if (n == 2) {
      det = e[0] * e[4] - e[1] * e[3];
      inv[0] = e[4] / det;
      inv[1] = -e[1] / det;
      inv[3] = -e[3] / det;
      inv[4] = e[0] / det;
    } else {
      det = e[0] * (e[4] * e[8] - e[5] * e[7]) - e[1] * (e[3] * e[8] - e[5] * e[6]) +
            e[2] * (e[3] * e[7] - e[4] * e[6]);
      inv[0] = (e[4] * e[8] - e[5] * e[7]) / det;
      inv[1] = (e[2] * e[7] - e[1] * e[8]) / det;
      inv[2] = (e[1] * e[5] - e[2] * e[4]) / det;
      inv[3] = (e[5] * e[6] - e[3] * e[8]) / det;
      inv[4] = (e[0] * e[8] - e[2] * e[6]) / det;
      inv[5] = (e[2] * e[3] - e[0] * e[5]) / det;
      inv[6] = (e[3] * e[7] - e[4] * e[6]) / det;
      inv[7] = (e[1] * e[6] - e[0] * e[7]) / det;
      inv[8] = (e[0] * e[4] - e[1] * e[3]) / det;
    }
    orientation_[cell] = det > 0 ? 1 : -1;
    auto& grad = gradients_[cell];
    for (int j = 1; j <= n; ++j)
      for (int a = 0; a < n; ++a) {
        grad[std::size_t(j) * 3 + a] = inv[(j - 1) * 3 + a];
        grad[a] -= inv[(j - 1) * 3 + a];
      }
    width_ = std::max(width_, diameter_[n][cell]);
    // altitudes: n |T| / |facet|
    for (int j = 0; j <= n; ++j) {
      double fm;
      if (n == 1)
        fm = 1.0;
      else {
        // opposite facet appears at lexicographic subset position (n - j)
        const int facet = cell_faces_[n - 1][cell][n - j];
        fm = measure_[n - 1][facet];
      }
      min_cell_width_ = std::min(min_cell_width_, n * measure_[n][cell] / fm);
    }
  }
}

double PeriodicMesh::total_volume() const {
  double v = 0.0;
  for (double m : measure_[lattice_.dim]) v += m;
  return v;
}

int PeriodicMesh::euler_characteristic() const {
  int chi = 0;
  for (int k = 0; k <= lattice_.dim; ++k) chi += (k % 2 == 0 ? 1 : -1) * count(k);
  return chi;
}

const SparseIntMatrix& PeriodicMesh::boundary_matrix(int k) const {
  require(k >= 1 && k <= lattice_.dim, "boundary_matrix: degree out of range");
  if (!boundary_built_[k]) {
    std::vector<IntTriplet> trip;
    trip.reserve(std::size_t(count(k)) * (k + 1));
    for (int i = 0; i < count(k); ++i) {
      const Simplex& s = simplices_[k][i];
      for (int j = 0; j <= k; ++j) {
        std::array<int, 4> face{-1, -1, -1, -1};
        int pos = 0;
        for (int l = 0; l <= k; ++l)
          if (l != j) face[pos++] = s.v[l];
        trip.push_back({index_[k - 1].at(face), i, (j % 2 == 0) ? 1 : -1});
      }
    }
    boundary_[k] = SparseIntMatrix::from_triplets(count(k - 1), count(k), std::move(trip));
    boundary_built_[k] = true;
  }
  return boundary_[k];
}

int PeriodicMesh::face_index(int k, std::array<int, 4> ids) const {
  auto it = index_[k].find(ids);
  return it == index_[k].end() ? -1 : it->second;
}

std::array<double, 3> PeriodicMesh::vertex_coord(int v) const {
  const int n = lattice_.dim, m = lattice_.subdivisions;
  std::array<double, 3> x{0, 0, 0};
  for (int a = 0; a < n; ++a) {
    x[a] = (v % m) * lattice_.cell_width(a);
    v /= m;
  }
  return x;
}

std::array<double, 3> PeriodicMesh::wrap(std::array<double, 3> x) const {
  for (int a = 0; a < lattice_.dim; ++a) {
    const double l = lattice_.lengths[a];
    x[a] -= l * std::floor(x[a] / l);
    if (x[a] >= l) x[a] = 0.0;
  }
  return x;
}

double PeriodicMesh::periodic_distance(const std::array<double, 3>& a,
                                       const std::array<double, 3>& b) const {
  double d2 = 0.0;
  for (int ax = 0; ax < lattice_.dim; ++ax) {
    const double l = lattice_.lengths[ax];
    double d = std::fabs(a[ax] - b[ax]);
    d -= l * std::floor(d / l);
    d = std::min(d, l - d);
    d2 += d * d;
  }
  return std::sqrt(d2);
}

PeriodicMesh::Location PeriodicMesh::locate(std::array<double, 3> x) const {
  const int n = lattice_.dim, m = lattice_.subdivisions;
  x = wrap(x);
  std::array<int, 3> g{0, 0, 0};
  std::array<double, 3> f{0, 0, 0};
  int cube = 0, stride = 1;
  for (int a = 0; a < n; ++a) {
    const double t = x[a] / lattice_.cell_width(a);
    g[a] = std::min(int(std::floor(t)), m - 1);
    f[a] = t - g[a];
    cube += g[a] * stride;
    stride *= m;
  }
  // the containing chain sorts the fractional parts descending; ties prefer
  // the earlier axis so the pick is deterministic
  std::array<int, 3> axes{0, 1, 2};
  std::stable_sort(axes.begin(), axes.begin() + n, [&](int a, int b) { return f[a] > f[b]; });
  int pi = -1;
  for (int p = 0; p < int(perms_.size()); ++p) {
    bool ok = true;
    for (int j = 0; j < n; ++j) ok = ok && perms_[p][j] == axes[j];
    if (ok) {
      pi = p;
      break;
    }
  }
  Location loc;
  loc.cell = cube_cells_[std::size_t(cube) * perms_.size() + pi];
  std::array<double, 4> lg{0, 0, 0, 0};
  lg[0] = 1.0 - f[axes[0]];
  for (int j = 1; j < n; ++j) lg[j] = f[axes[j - 1]] - f[axes[j]];
  lg[n] = f[axes[n - 1]];
  loc.lambda = {0, 0, 0, 0};
  for (int j = 0; j <= n; ++j) loc.lambda[gen_to_sorted_[loc.cell][j]] = lg[j];
  return loc;
}

}  // namespace wdirac
