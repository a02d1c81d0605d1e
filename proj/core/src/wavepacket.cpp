#include "wwsim/wavepacket.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "wwsim/error.hpp"
#include "wwsim/tolerance.hpp"

namespace wwsim {

void MomentumGrid::validate() const {
  if (!(p_min < p_max)) throw InvalidState("momentum grid needs p_min < p_max");
  if (n_points < 8) throw InvalidState("momentum grid needs at least 8 points");
}

MomentumGrid MomentumGrid::centered(double center, double half_span, std::size_t n_points) {
  return {center - half_span, center + half_span, n_points};
}

Wavepacket::Wavepacket(MomentumGrid grid, Amplitudes samples, double center, double width)
    : grid_(grid), samples_(std::move(samples)), center_(center), width_(width) {
  grid_.validate();
  if (static_cast<std::size_t>(samples_.size()) != grid_.n_points)
    throw DimensionMismatch("wavepacket sample count does not match its grid");
  if (std::abs(norm() - 1.0) > tolerance::packet_norm)
    throw InvalidState("wavepacket is not normalized on its grid");
}

double Wavepacket::norm() const { return samples_.squaredNorm() * grid_.spacing(); }

double Wavepacket::edge_amplitude() const {
  return std::max(std::abs(samples_[0]), std::abs(samples_[samples_.size() - 1]));
}

double Wavepacket::mean_momentum() const { return momentum_element(*this, *this).real(); }

Wavepacket gaussian(const MomentumGrid& grid, double p0, double sigma) {
  grid.validate();
  if (!(sigma > 0.0)) throw InvalidState("gaussian width must be positive");
  if (grid.p_min > p0 - 8.0 * sigma || grid.p_max < p0 + 8.0 * sigma)
    throw GridTooNarrow("grid must span at least p0 +/- 8 sigma");

  Amplitudes samples(static_cast<Eigen::Index>(grid.n_points));
  for (std::size_t i = 0; i < grid.n_points; ++i) {
    const double x = (grid.momentum(i) - p0) / sigma;
    samples[static_cast<Eigen::Index>(i)] = std::exp(-0.25 * x * x);
  }
  samples /= std::sqrt(samples.squaredNorm() * grid.spacing());
  return Wavepacket(grid, std::move(samples), p0, sigma);
}

Amplitudes spectral_shift(const Amplitudes& samples, double samples_shift) {
  if (samples_shift == 0.0) return samples;
  const auto n = static_cast<std::ptrdiff_t>(samples.size());

  std::vector<Complex> in(samples.data(), samples.data() + n);
  std::vector<Complex> spectrum;
  Eigen::FFT<double> fft;
  fft.fwd(spectrum, in);

  // Frequencies folded to [-n/2, n/2).
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const std::ptrdiff_t signed_k = (2 * k < n) ? k : k - n;
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(signed_k) * samples_shift /
                         static_cast<double>(n);
    spectrum[static_cast<std::size_t>(k)] *= std::polar(1.0, angle);
  }

  std::vector<Complex> out;
  fft.inv(out, spectrum);
  return Eigen::Map<Amplitudes>(out.data(), n);
}

Wavepacket shift(const Wavepacket& psi, double dp) {
  const MomentumGrid& grid = psi.grid();
  if (std::abs(dp) >= grid.span() / 4.0)
    throw ShiftTooLarge("recoil shift exceeds a quarter of the momentum grid span");
  if (dp == 0.0) return psi;
  return Wavepacket(grid, spectral_shift(psi.samples(), dp / grid.spacing()), psi.center() + dp, psi.width());
}

Complex overlap(const Wavepacket& a, const Wavepacket& b) {
  if (!(a.grid() == b.grid())) throw GridMismatch("overlap of wavepackets on different grids");
  return a.samples().dot(b.samples()) * a.grid().spacing();
}

Complex momentum_element(const Wavepacket& a, const Wavepacket& b) {
  if (!(a.grid() == b.grid())) throw GridMismatch("momentum element of wavepackets on different grids");
  const MomentumGrid& grid = a.grid();
  Complex acc = 0.0;
  for (std::size_t i = 0; i < grid.n_points; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    acc += std::conj(a.samples()[k]) * grid.momentum(i) * b.samples()[k];
  }
  return acc * grid.spacing();
}

}  // namespace wwsim
