#ifndef KDVDG_EOC_HPP
#define KDVDG_EOC_HPP

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace kdv {

/// Experimental order of convergence: the local slope of log a vs log h,
/// EOC(a, h; i) = log(a_{i+1}/a_i) / log(h_{i+1}/h_i).
inline double eoc(double a_i, double a_ip1, double h_i, double h_ip1) {
  return std::log(a_ip1 / a_i) / std::log(h_ip1 / h_i);
}

/// One tracked quantity per refinement level plus its EOC column.
struct EocTable {
  std::vector<double> h; // per level
  std::vector<std::string> names;
  std::vector<std::vector<double>> values; // [quantity][level]

  int levels() const { return static_cast<int>(h.size()); }

  void add_quantity(const std::string& name) {
    names.push_back(name);
    values.emplace_back();
  }

  /// EOC between levels i and i+1 for quantity column c.
  double eoc_at(int c, int i) const {
    return eoc(values[c][i], values[c][i + 1], h[i], h[i + 1]);
  }
};

} // namespace kdv

#endif
