#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace fnls {

/// Uniform periodic Cartesian grid on the box prod_j [-L_j/2, L_j/2).
///
/// Storage order is row-major with the last axis fastest, matching the
/// in-memory layout used for the transforms. Wavenumbers follow the
/// convention k = 2*pi*m/L with m in {0,...,n/2-1, -n/2,...,-1}; the
/// forward transform applies e^{-i k x}.
class Grid {
public:
  Grid(std::vector<int> n, std::vector<double> L);

  int dim() const { return static_cast<int>(n_.size()); }
  std::size_t size() const { return size_; }
  int n(int axis) const { return n_[axis]; }
  double length(int axis) const { return L_[axis]; }
  double spacing(int axis) const { return L_[axis] / n_[axis]; }
  /// Volume element prod_j h_j of one cell.
  double cell_volume() const { return cell_volume_; }
  /// Total box volume prod_j L_j.
  double volume() const { return volume_; }

  double coord(int axis, int index) const {
    return -0.5 * L_[axis] + index * spacing(axis);
  }

  const std::vector<double>& wavenumbers(int axis) const { return k_[axis]; }
  /// Wavenumbers with the Nyquist mode zeroed, for odd-order multipliers.
  const std::vector<double>& wavenumbers_odd(int axis) const { return k_odd_[axis]; }

  /// |k|^2 per flat index.
  const std::vector<double>& ksq() const { return ksq_; }
  /// 2/3-rule dealias mask per flat index (1 = keep).
  const std::vector<unsigned char>& dealias_mask() const { return mask_; }

  std::size_t stride(int axis) const { return stride_[axis]; }
  int axis_index(std::size_t flat, int axis) const {
    return static_cast<int>((flat / stride_[axis]) % n_[axis]);
  }
  /// Decode a flat index into per-axis indices (idx must have dim() slots).
  void unflatten(std::size_t flat, int* idx) const {
    for (int a = 0; a < dim(); ++a) idx[a] = axis_index(flat, a);
  }
  std::size_t flatten(const int* idx) const {
    std::size_t f = 0;
    for (int a = 0; a < dim(); ++a) f += static_cast<std::size_t>(idx[a]) * stride_[a];
    return f;
  }

  bool same_shape(const Grid& other) const {
    return n_ == other.n_ && L_ == other.L_;
  }

private:
  std::vector<int> n_;
  std::vector<double> L_;
  std::vector<std::size_t> stride_;
  std::vector<std::vector<double>> k_;
  std::vector<std::vector<double>> k_odd_;
  std::vector<double> ksq_;
  std::vector<unsigned char> mask_;
  std::size_t size_ = 0;
  double cell_volume_ = 1.0;
  double volume_ = 1.0;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(std::vector<int> n, std::vector<double> L);
/// Cubic grid: n points and length L on each of N axes.
GridPtr make_grid(int N, int n, double L);

} // namespace fnls
