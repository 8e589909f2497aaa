#include "fnls/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fnls {

namespace {
// Even and composed of small prime factors, so the transforms stay fast.
bool fft_friendly(int n) {
  if (n < 4 || n % 2 != 0) return false;
  for (int p : {2, 3, 5})
    while (n % p == 0) n /= p;
  return n == 1;
}
}

Grid::Grid(std::vector<int> n, std::vector<double> L)
    : n_(std::move(n)), L_(std::move(L)) {
  if (n_.empty() || n_.size() != L_.size())
    throw std::invalid_argument("Grid: need matching per-axis point counts and lengths");
  const int d = dim();
  size_ = 1;
  for (int a = 0; a < d; ++a) {
    if (!fft_friendly(n_[a]))
      throw std::invalid_argument("Grid: point counts must be even with prime factors in {2,3,5}");
    if (!(L_[a] > 0.0))
      throw std::invalid_argument("Grid: lengths must be positive");
    size_ *= static_cast<std::size_t>(n_[a]);
    cell_volume_ *= spacing(a);
    volume_ *= L_[a];
  }

  stride_.assign(d, 1);
  for (int a = d - 2; a >= 0; --a)
    stride_[a] = stride_[a + 1] * static_cast<std::size_t>(n_[a + 1]);

  k_.resize(d);
  k_odd_.resize(d);
  for (int a = 0; a < d; ++a) {
    k_[a].resize(n_[a]);
    k_odd_[a].resize(n_[a]);
    const double dk = 2.0 * std::numbers::pi / L_[a];
    for (int m = 0; m < n_[a]; ++m) {
      const int ms = (m < n_[a] / 2) ? m : m - n_[a];
      k_[a][m] = dk * ms;
      k_odd_[a][m] = (m == n_[a] / 2) ? 0.0 : dk * ms;
    }
  }

  ksq_.assign(size_, 0.0);
  mask_.assign(size_, 1);
  std::vector<int> idx(d, 0);
  for (std::size_t f = 0; f < size_; ++f) {
    double k2 = 0.0;
    bool keep = true;
    for (int a = 0; a < d; ++a) {
      const int m = axis_index(f, a);
      const double k = k_[a][m];
      k2 += k * k;
      const int ms = (m < n_[a] / 2) ? m : m - n_[a];
      if (std::abs(ms) > n_[a] / 3) keep = false;
    }
    ksq_[f] = k2;
    mask_[f] = keep ? 1 : 0;
  }
}

GridPtr make_grid(std::vector<int> n, std::vector<double> L) {
  return std::make_shared<Grid>(std::move(n), std::move(L));
}

GridPtr make_grid(int N, int n, double L) {
  return make_grid(std::vector<int>(N, n), std::vector<double>(N, L));
}

} // namespace fnls
