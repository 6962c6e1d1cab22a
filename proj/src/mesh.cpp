#include "kdvdg/mesh.hpp"

#include <algorithm>
#include <stdexcept>

namespace kdv {

double Mesh::max_h() const {
  return *std::max_element(cell_sizes.begin(), cell_sizes.end());
}

std::shared_ptr<const Mesh> build_uniform_mesh(int num_cells,
                                               double domain_length) {
  if (num_cells < 2)
    throw std::invalid_argument("build_uniform_mesh: need at least 2 cells");
  if (!(domain_length > 0.0))
    throw std::invalid_argument("build_uniform_mesh: domain length must be positive");

  auto mesh = std::make_shared<Mesh>();
  mesh->domain_length = domain_length;
  mesh->nodes.resize(num_cells + 1);
  mesh->cell_sizes.resize(num_cells);
  for (int j = 0; j <= num_cells; ++j)
    mesh->nodes[j] = domain_length * j / num_cells;
  mesh->nodes[num_cells] = domain_length;
  for (int j = 0; j < num_cells; ++j)
    mesh->cell_sizes[j] = mesh->nodes[j + 1] - mesh->nodes[j];
  return mesh;
}

} // namespace kdv
