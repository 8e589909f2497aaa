#pragma once

#include <cstdint>
#include <vector>

#include "fnls/field.hpp"
#include "fnls/model.hpp"

namespace fnls {

/// (-Delta)^p f via the Fourier multiplier |k|^{2p}. Callers pass p = s/2
/// for the half-power, p = s for the full operator, and so on. The zero
/// mode is annihilated. Output is returned in the representation of the
/// input.
Field fractional_power(const Field& f, double p);

/// Fractional power acting only along the given axes: multiplier
/// (sum_{a in axes} k_a^2)^p. partial over the last axis realizes
/// (-d^2/dxN^2)^p; partial over the leading N-1 axes realizes (-Delta_y)^p.
Field partial_fractional(const Field& f, double p, const std::vector<int>& axes);

/// Convenience wrapper for the last-axis operator (-d^2/dxN^2)^p.
Field partial_fractional_xN(const Field& f, double p);

/// Spectral gradient; component j applies i*k_j with the Nyquist mode
/// zeroed. Results are in physical space.
std::vector<Field> gradient(const Field& f);

/// Gradient restricted to the listed axes (other components omitted).
std::vector<Field> gradient_axes(const Field& f, const std::vector<int>& axes);

/// integral |f|^2 dx by the uniform-grid Riemann sum.
double mass(const Field& f);

/// integral |f|^p dx.
double lp_norm_pow(const Field& f, double p);

/// E[f] = 1/2 ||(-Delta)^{s/2} f||_2^2 - 1/(2 sigma + 2) ||f||_{2s+2}^{2s+2}.
double energy(const Field& f, const ModelParams& params);

/// ||(-Delta)^{s/2} f||_2 evaluated by Plancherel in frequency space.
double sobolev_seminorm(const Field& f, double s);

/// L2 inner product Re integral conj(a) b dx.
double inner_real(const Field& a, const Field& b);

/// Mass contained in the outermost shell (any coordinate within the given
/// fraction of the box edge; default outermost 10%).
double boundary_mass(const Field& f, double shell_fraction = 0.1);

/// Apply the 2/3-rule dealias mask in frequency space.
void dealias(Field& f);

/// Max deviation |u(g x) - u(x)| over the generators of the exact discrete
/// y-symmetry group (coordinate permutations and sign flips of the first
/// N-1 axes). Zero for cylindrically symmetric samples.
double cyl_symmetry_deviation(const Field& f);

/// Seeded random band-limited field: complex Gaussian spectrum restricted
/// to |m_a| <= band per axis, then normalized to unit L2 mass.
Field random_band_limited(const GridPtr& grid, int band, std::uint64_t seed);

/// Seeded random cylindrically symmetric smooth field: a sum of complex
/// Gaussian ring bumps in (|y|, x_N), spectrally low-passed.
Field random_cylindrical(const GridPtr& grid, std::uint64_t seed, int bumps = 4);

} // namespace fnls
