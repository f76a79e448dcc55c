#include "wdirac/homology.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>

namespace wdirac {

namespace {

std::int64_t mod_pos(std::int64_t v, std::int64_t p) {
  v %= p;
  return v < 0 ? v + p : v;
}

std::int64_t pow_mod(std::int64_t b, std::int64_t e, std::int64_t p) {
  std::int64_t r = 1;
  b %= p;
  while (e > 0) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
    e >>= 1;
  }
  return r;
}

std::int64_t inv_mod(std::int64_t v, std::int64_t p) { return pow_mod(v, p - 2, p); }

using Row = std::vector<std::pair<int, std::int64_t>>;  // sorted by column

// Sparse Gaussian elimination over GF(p) with min-fill-flavored pivoting:
// rows are consumed smallest first, pivot column picked by live column
// degree.  Incidence matrices of these meshes eliminate with little fill.
class Eliminator {
 public:
  Eliminator(std::size_t cols, long long p) : p_(p), col_rows_(cols) {}

  void add_row(Row row) {
    Row clean;
    for (auto& [c, v] : row) {
      const std::int64_t m = mod_pos(v, p_);
      if (m != 0) clean.push_back({c, m});
    }
    std::sort(clean.begin(), clean.end());
    const int id = int(rows_.size());
    for (auto& [c, v] : clean) col_rows_[c].push_back(id);
    rows_.push_back(std::move(clean));
  }

  long long rank() {
    done_.assign(rows_.size(), false);
    using Item = std::pair<std::size_t, int>;  // (nnz, row)
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (int i = 0; i < int(rows_.size()); ++i)
      if (!rows_[i].empty()) heap.push({rows_[i].size(), i});
    long long rank = 0;
    while (!heap.empty()) {
      const auto [nnz, r] = heap.top();
      heap.pop();
      if (done_[r] || rows_[r].empty() || rows_[r].size() != nnz) continue;
      ++rank;
      done_[r] = true;
      // pivot column: fewest live rows
      int pc = -1;
      std::size_t best = SIZE_MAX;
      for (auto& [c, v] : rows_[r]) {
        const std::size_t deg = live_degree(c);
        if (deg < best) best = deg, pc = c;
      }
      const std::int64_t pv = value_at(rows_[r], pc);
      const std::int64_t pv_inv = inv_mod(pv, p_);
      std::vector<int> targets = col_rows_[pc];
      for (int r2 : targets) {
        if (r2 == r || done_[r2]) continue;
        const std::int64_t v2 = value_at(rows_[r2], pc);
        if (v2 == 0) continue;
        eliminate(rows_[r2], rows_[r], v2 * pv_inv % p_, r2);
        if (!rows_[r2].empty()) heap.push({rows_[r2].size(), r2});
      }
      for (auto& [c, v] : rows_[r]) purge(c);
    }
    return rank;
  }

 private:
  std::size_t live_degree(int c) {
    auto& lst = col_rows_[c];
    std::size_t deg = 0;
    for (int r : lst)
      if (!done_[r] && value_at(rows_[r], c) != 0) ++deg;
    return deg;
  }

  static std::int64_t value_at(const Row& row, int c) {
    auto it = std::lower_bound(row.begin(), row.end(), std::make_pair(c, std::int64_t(0)));
    return (it != row.end() && it->first == c) ? it->second : 0;
  }

  // row2 <- row2 - f * row1 (mod p)
  void eliminate(Row& row2, const Row& row1, std::int64_t f, int id2) {
    Row out;
    out.reserve(row2.size() + row1.size());
    std::size_t i = 0, j = 0;
    while (i < row2.size() || j < row1.size()) {
      if (j >= row1.size() || (i < row2.size() && row2[i].first < row1[j].first)) {
        out.push_back(row2[i++]);
      } else if (i >= row2.size() || row1[j].first < row2[i].first) {
        const std::int64_t v = mod_pos(-f * row1[j].second, p_);
        if (v != 0) {
          out.push_back({row1[j].first, v});
          col_rows_[row1[j].first].push_back(id2);  // fill-in
        }
        ++j;
      } else {
        const std::int64_t v = mod_pos(row2[i].second - f * row1[j].second % p_, p_);
        if (v != 0) out.push_back({row2[i].first, v});
        ++i;
        ++j;
      }
    }
    row2 = std::move(out);
  }

  void purge(int c) {
    auto& lst = col_rows_[c];
    lst.erase(std::remove_if(lst.begin(), lst.end(),
                             [&](int r) { return done_[r] || value_at(rows_[r], c) == 0; }),
              lst.end());
  }

  long long p_;
  std::vector<Row> rows_;
  std::vector<std::vector<int>> col_rows_;
  std::vector<bool> done_;
};

Eliminator load(const SparseIntMatrix& a, const std::vector<SparseIntColumn>& extra, long long p) {
  Eliminator e(a.cols() + extra.size(), p);
  // eliminate the transpose: rank is the same and the columns of the
  // incidence matrices are the short dimension's rows
  std::vector<Row> rows(a.rows());
  a.for_each([&](int r, int c, std::int64_t v) { rows[r].push_back({c, v}); });
  for (std::size_t j = 0; j < extra.size(); ++j)
    for (auto& [r, v] : extra[j]) rows[r].push_back({int(a.cols() + j), v});
  for (auto& row : rows) e.add_row(std::move(row));
  return e;
}

}  // namespace

long long rank_mod_p(const SparseIntMatrix& a, long long p) {
  return load(a, {}, p).rank();
}

long long rank_mod_p_augmented(const SparseIntMatrix& a, const std::vector<SparseIntColumn>& extra,
                               long long p) {
  return load(a, extra, p).rank();
}

std::vector<long long> betti_mod_p(const PeriodicMesh& mesh, long long p) {
  const int n = mesh.dim();
  std::vector<long long> rank(n + 2, 0);
  for (int k = 1; k <= n; ++k) rank[k] = rank_mod_p(mesh.boundary_matrix(k), p);
  std::vector<long long> b(n + 1);
  for (int k = 0; k <= n; ++k) b[k] = mesh.count(k) - rank[k] - rank[k + 1];
  return b;
}

SparseIntColumn fundamental_cycle(const PeriodicMesh& mesh) {
  SparseIntColumn z;
  for (int cell = 0; cell < mesh.count(mesh.dim()); ++cell)
    z.push_back({cell, mesh.cell_orientation(cell)});
  return z;
}

std::vector<SparseIntColumn> axis_cycles(const PeriodicMesh& mesh, int k) {
  const int n = mesh.dim(), m = mesh.lattice().subdivisions;
  require(k >= 1 && k <= n, "axis_cycles: degree out of range");
  std::vector<SparseIntColumn> cycles;
  for (const auto& subset : ascending_subsets(n, k)) {
    std::map<int, std::int64_t> acc;
    std::vector<int> axes(subset.begin(), subset.begin() + k);
    int n_sub = 1;
    for (int i = 0; i < k; ++i) n_sub *= m;
    for (int sub = 0; sub < n_sub; ++sub) {
      std::array<int, 3> g{0, 0, 0};
      int rem = sub;
      for (int i = 0; i < k; ++i) {
        g[axes[i]] = rem % m;
        rem /= m;
      }
      std::vector<int> perm = axes;
      std::sort(perm.begin(), perm.end());
      do {
        std::array<int, 3> off{0, 0, 0};
        std::array<int, 4> ids{-1, -1, -1, -1};
        std::array<std::array<int, 3>, 4> pos{};
        for (int j = 0; j <= k; ++j) {
          int id = 0, stride = 1;
          for (int a = 0; a < n; ++a) {
            id += ((g[a] + off[a]) % m) * stride;
            stride *= m;
          }
          ids[j] = id;
          pos[j] = {g[0] + off[0], g[1] + off[1], g[2] + off[2]};
          if (j < k) off[perm[j]] += 1;
        }
        std::array<int, 4> order{0, 1, 2, 3};
        std::sort(order.begin(), order.begin() + k + 1,
                  [&](int a, int b) { return ids[a] < ids[b]; });
        std::array<int, 4> tup{-1, -1, -1, -1};
        for (int j = 0; j <= k; ++j) tup[j] = ids[order[j]];
        const int idx = mesh.face_index(k, tup);
        if (idx < 0) throw NumericalFailure("axis_cycles: sub-torus simplex not in mesh");
        // orientation of the sorted simplex inside the oriented axis plane
        long long e[9] = {0};
        for (int j = 1; j <= k; ++j)
          for (int i = 0; i < k; ++i)
            e[(j - 1) * 3 + i] = pos[order[j]][axes[i]] - pos[order[0]][axes[i]];
        long long det;
        if (k == 1)
          det = e[0];
        else if (k == 2)
          det = e[0] * e[4] - e[1] * e[3];
        else
          det = e[0] * (e[4] * e[8] - e[5] * e[7]) - e[1] * (e[3] * e[8] - e[5] * e[6]) +
                e[2] * (e[3] * e[7] - e[4] * e[6]);
        acc[idx] += det > 0 ? 1 : -1;
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
    SparseIntColumn z;
    for (auto& [idx, v] : acc)
      if (v != 0) z.push_back({idx, v});
    cycles.push_back(std::move(z));
  }
  return cycles;
}

bool is_cycle(const PeriodicMesh& mesh, int k, const SparseIntColumn& z) {
  std::vector<std::int64_t> x(mesh.count(k), 0);
  for (auto& [i, v] : z) x[i] += v;
  const auto y = mesh.boundary_matrix(k).matvec(x);
  return std::all_of(y.begin(), y.end(), [](std::int64_t v) { return v == 0; });
}

BettiCertificate certified_betti(const PeriodicMesh& mesh) {
  const int n = mesh.dim();
  BettiCertificate cert;
  cert.primes = {2, 2147483629LL};
  const auto b1 = betti_mod_p(mesh, cert.primes[0]);
  const auto b2 = betti_mod_p(mesh, cert.primes[1]);
  cert.betti = b2;
  cert.betti_match_across_primes = b1 == b2;

  cert.cycles_verified = true;
  cert.independence_verified = true;
  for (int k = 1; k <= n; ++k) {
    const auto cycles = axis_cycles(mesh, k);
    for (const auto& z : cycles) cert.cycles_verified = cert.cycles_verified && is_cycle(mesh, k, z);
    // the cycles must stay independent after adjoining the (k+1)-boundaries
    SparseIntMatrix img = k < n ? mesh.boundary_matrix(k + 1)
                                : SparseIntMatrix::from_triplets(mesh.count(n), 0, {});
    const long long base = k < n ? rank_mod_p(img, cert.primes[1]) : 0;
    const long long aug = rank_mod_p_augmented(img, cycles, cert.primes[1]);
    cert.independence_verified =
        cert.independence_verified && (aug == base + (long long)cycles.size());
  }
  return cert;
}

}  // namespace wdirac
