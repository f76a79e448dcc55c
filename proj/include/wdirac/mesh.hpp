#pragma once

#include <array>
#include <map>
#include <memory>
#include <vector>

#include "wdirac/linalg.hpp"

namespace wdirac {

long long binomial(int n, int k);

// Ascending size-subsets of {0, .., n_elems-1} in lexicographic order;
// cached, do not mutate.
const std::vector<std::array<int, 4>>& ascending_subsets(int n_elems, int size);

// Flat torus R^dim / (L_1 Z x .. x L_dim Z) with m cells per period per axis.
struct Lattice {
  int dim = 1;
  std::array<double, 3> lengths = {1.0, 1.0, 1.0};
  int subdivisions = 4;

  void validate() const;
  double cell_width(int axis) const { return lengths[axis] / subdivisions; }
};

struct Simplex {
  std::array<int, 4> v{-1, -1, -1, -1};  // ascending global vertex ids
};

struct FacetPair {
  int facet;       // index into the (dim-1)-simplex list
  int cell_plus;   // lower cell index
  int cell_minus;  // higher cell index
};

// Freudenthal (sorted-coordinate) triangulation of the periodic lattice.
// Every k-simplex carries an unwrapped coordinate representative; simplices
// crossing the periodic seam unwrap past L, and representatives arising from
// different generating cubes are checked to agree up to lattice translation.
class PeriodicMesh {
 public:
  static std::shared_ptr<const PeriodicMesh> build(const Lattice& lattice);

  const Lattice& lattice() const { return lattice_; }
  int dim() const { return lattice_.dim; }
  int count(int k) const { return int(simplices_[k].size()); }
  const Simplex& simplex(int k, int i) const { return simplices_[k][i]; }
  // unwrapped vertex coordinates, (k+1) x dim, row-major
  const double* coords(int k, int i) const { return coords_[k][i].data(); }
  double measure(int k, int i) const { return measure_[k][i]; }
  double diameter(int k, int i) const { return diameter_[k][i]; }

  double width() const { return width_; }                    // max cell diameter
  double min_cell_width() const { return min_cell_width_; }  // min cell altitude
  double total_volume() const;
  int euler_characteristic() const;

  // signed incidence of (k-1)-faces in k-simplices, faces signed by position
  // parity in the ascending tuple
  const SparseIntMatrix& boundary_matrix(int k) const;
  const std::vector<FacetPair>& facet_pairs() const { return facet_pairs_; }

  // global index of the `local`-th k-face (lexicographic subset order) of a
  // top cell
  int cell_face(int cell, int k, int local) const { return cell_faces_[k][cell][local]; }
  int face_index(int k, std::array<int, 4> ascending_ids) const;

  // barycentric gradients of the top cell, (dim+1) x dim row-major
  const double* cell_gradients(int cell) const { return gradients_[cell].data(); }
  int cell_orientation(int cell) const { return orientation_[cell]; }

  struct Location {
    int cell;
    std::array<double, 4> lambda;  // barycentric w.r.t. the stored vertex order
  };
  Location locate(std::array<double, 3> x) const;

  std::array<double, 3> vertex_coord(int v) const;
  std::array<double, 3> wrap(std::array<double, 3> x) const;
  double periodic_distance(const std::array<double, 3>& a, const std::array<double, 3>& b) const;

  // cells sharing at least one vertex with `cell`, including itself
  const std::vector<int>& cell_neighbors(int cell) const { return neighbors_[cell]; }

 private:
  PeriodicMesh() = default;
  void build_cells();
  void build_faces();
  void build_geometry();

  Lattice lattice_;
  std::vector<std::vector<Simplex>> simplices_;                 // per degree
  std::vector<std::vector<std::vector<double>>> coords_;        // per degree
  std::vector<std::vector<double>> measure_, diameter_;         // per degree
  std::vector<std::map<std::array<int, 4>, int>> index_;        // tuple -> id
  std::vector<std::vector<std::vector<int>>> cell_faces_;       // [k][cell][local]
  std::vector<FacetPair> facet_pairs_;
  std::vector<std::array<double, 12>> gradients_;
  std::vector<int> orientation_;
  std::vector<std::array<int, 4>> gen_to_sorted_;  // chain position -> tuple position
  std::vector<int> cube_cells_;                    // [cube * dim! + perm] -> cell
  std::vector<std::vector<int>> perms_;
  std::vector<std::vector<int>> neighbors_;
  mutable std::vector<SparseIntMatrix> boundary_;  // lazily built, index k-1
  mutable std::vector<bool> boundary_built_;
  double width_ = 0.0, min_cell_width_ = 0.0;
};

}  // namespace wdirac
