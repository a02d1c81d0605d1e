#pragma once

// Momentum-space wavefunctions of a macroscopic body (a beam splitter) and
// the recoil translation psi(p) -> psi(p - dp).
//
// The grid is periodic: p_i = p_min + i * dp for i in [0, n), so p_max itself
// is not a sample point. Translations are applied spectrally, which makes
// them exactly unitary and exactly composable.

#include <cstddef>

#include "wwsim/tensor.hpp"

namespace wwsim {

struct MomentumGrid {
  double p_min = -10.0;
  double p_max = 10.0;
  std::size_t n_points = 1024;

  // Throws InvalidState unless p_min < p_max and n_points >= 8.
  void validate() const;

  double spacing() const { return (p_max - p_min) / static_cast<double>(n_points); }
  double span() const { return p_max - p_min; }
  double momentum(std::size_t i) const { return p_min + static_cast<double>(i) * spacing(); }

  // [center - half_span, center + half_span) with n points.
  static MomentumGrid centered(double center, double half_span, std::size_t n_points);

  friend bool operator==(const MomentumGrid&, const MomentumGrid&) = default;
};

class Wavepacket {
 public:
  // Throws DimensionMismatch on a sample count mismatch and InvalidState when
  // the discrete norm sum |psi_i|^2 dp is not 1 within 1e-8.
  Wavepacket(MomentumGrid grid, Amplitudes samples, double center, double width);

  const MomentumGrid& grid() const { return grid_; }
  const Amplitudes& samples() const { return samples_; }
  // Nominal parameters of the packet; a shifted packet carries center + dp.
  double center() const { return center_; }
  double width() const { return width_; }

  double norm() const;
  // max(|psi_0|, |psi_{n-1}|): leakage toward the periodic boundary.
  double edge_amplitude() const;
  double mean_momentum() const;

 private:
  MomentumGrid grid_;
  Amplitudes samples_;
  double center_ = 0.0;
  double width_ = 1.0;
};

// psi(p) proportional to exp(-(p - p0)^2 / (4 sigma^2)), so |psi|^2 has
// standard deviation sigma. Throws GridTooNarrow unless the grid covers
// [p0 - 8 sigma, p0 + 8 sigma].
Wavepacket gaussian(const MomentumGrid& grid, double p0, double sigma);

// Translates periodic samples by `samples_shift` grid steps (fractional
// allowed) with a phase ramp on the discrete spectrum.
Amplitudes spectral_shift(const Amplitudes& samples, double samples_shift);

// psi(p - dp). Throws ShiftTooLarge if |dp| >= span / 4.
Wavepacket shift(const Wavepacket& psi, double dp);

// sum_i conj(a_i) b_i dp. Throws GridMismatch.
Complex overlap(const Wavepacket& a, const Wavepacket& b);

// sum_i conj(a_i) p_i b_i dp. Throws GridMismatch.
Complex momentum_element(const Wavepacket& a, const Wavepacket& b);

}  // namespace wwsim
