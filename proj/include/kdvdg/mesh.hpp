#ifndef KDVDG_MESH_HPP
#define KDVDG_MESH_HPP

#include <memory>
#include <vector>

namespace kdv {

/// Periodic 1D partition 0 = x_0 < x_1 < ... < x_N = L with node N
/// identified with node 0. Face j in {0,...,N-1} sits at x_j; face 0
/// carries the periodic wrap, [g]_0 = g(x_N^-) - g(x_0^+).
struct Mesh {
  double domain_length = 0.0;
  std::vector<double> nodes;      // size N+1, nodes[0] = 0, nodes[N] = L
  std::vector<double> cell_sizes; // size N

  int num_cells() const { return static_cast<int>(cell_sizes.size()); }

  int left_cell_of_face(int face) const {
    const int n = num_cells();
    return (face + n - 1) % n;
  }
  int right_cell_of_face(int face) const { return face; }

  /// Average of the mesh-size function at face j, (h_{j-1} + h_j)/2.
  double avg_h(int face) const {
    return 0.5 * (cell_sizes[left_cell_of_face(face)] + cell_sizes[face]);
  }

  double max_h() const;
};

/// N cells of size L/N. Throws std::invalid_argument for num_cells < 2 or
/// domain_length <= 0.
std::shared_ptr<const Mesh> build_uniform_mesh(int num_cells,
                                               double domain_length);

} // namespace kdv

#endif
