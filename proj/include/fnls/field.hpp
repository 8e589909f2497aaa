#pragma once

#include <complex>
#include <Eigen/Core>

#include "fnls/grid.hpp"

namespace fnls {

enum class Space { Physical, Frequency };

/// Complex scalar field sampled on a periodic grid, in either physical or
/// frequency representation. Frequency coefficients are unnormalized DFT
/// values (forward e^{-ik.x}); the inverse transform carries 1/prod(n_j).
struct Field {
  GridPtr grid;
  Eigen::ArrayXcd v;
  Space space = Space::Physical;

  Field() = default;
  explicit Field(GridPtr g, Space sp = Space::Physical)
      : grid(std::move(g)), v(Eigen::ArrayXcd::Zero(static_cast<Eigen::Index>(grid->size()))),
        space(sp) {}

  std::size_t size() const { return grid ? grid->size() : 0; }
  bool finite() const { return v.isFinite().all(); }
};

/// In-place transforms (plan cache behind the scenes).
void to_frequency(Field& f);
void to_physical(Field& f);

Field in_frequency(const Field& f);
Field in_physical(const Field& f);

/// Sample a function of the physical coordinates onto a new field.
template <typename F>
Field sample(const GridPtr& grid, F&& fn) {
  Field out(grid);
  const int d = grid->dim();
  std::vector<double> x(d);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    for (int a = 0; a < d; ++a) x[a] = grid->coord(a, grid->axis_index(i, a));
    out.v[static_cast<Eigen::Index>(i)] = fn(x);
  }
  return out;
}

} // namespace fnls
