#pragma once

// Single-photon Mach-Zehnder interferometer whose beam splitters are quantum
// bodies that recoil on reflection.
//
// Mode transformations, written for creation operators as in the usual
// Heisenberg-picture convention (E^-_k = exp(-dp.grad_k), E^+_k its inverse,
// acting on the wavepacket of beam splitter k):
//
//   input BS:   a1+ = t1* b1+ - r1 E^-_1 O_ww b2+
//               a2+ = r1* E^+_1 O_ww+ b1+ + t1 b2+
//   phase:      b1+ -> exp(i phi) b1+
//   output BS:  b1+ = t2* a3+ - r2 E^+_2 a4+
//               b2+ = r2* E^-_2 a3+ + t2 a4+
//
// E^-_k moves the wavepacket of BS k by -dp_k (the body takes the momentum
// opposite to the reflected photon); E^+_k moves it by +dp_k.
//
// The evolved state lives on (path{3,4}, bs_in grid, bs_out grid, ww{2}). It
// is kept factorized: a handful of branches, each a product of a port, two
// shifted copies of the initial packets and a pointer vector.

#include <array>
#include <optional>
#include <vector>

#include "wwsim/tensor.hpp"
#include "wwsim/wavepacket.hpp"

namespace wwsim {

struct PacketSpec {
  double p0 = 0.0;
  double sigma = 1.0;
  // Grid half-width in units of sigma.
  double half_span = 10.0;
  std::size_t n_points = 1024;

  MomentumGrid grid() const { return MomentumGrid::centered(p0, half_span * sigma, n_points); }
};

struct BeamSplitterSpec {
  Complex t = std::sqrt(0.5);
  Complex r = std::sqrt(0.5);
  // Absolute recoil momentum; falls back to InterferometerConfig::recoil.
  std::optional<double> recoil;
  PacketSpec packet;

  std::vector<std::string> violations() const;

  static BeamSplitterSpec balanced() { return {}; }
};

enum class Arm { reflected, transmitted };

struct WhichWayDetectorSpec {
  Arm arm = Arm::reflected;
  // <unfired|fired>: 0 is a perfect which-way marker, 1 no marker at all.
  double gamma = 0.0;
};

struct InterferometerConfig {
  BeamSplitterSpec bs_in;
  // Absent: t2 = 1, r2 = 0.
  std::optional<BeamSplitterSpec> bs_out = BeamSplitterSpec{};
  double phase = 0.0;
  double recoil = 0.0;
  std::optional<WhichWayDetectorSpec> ww;
  int input_port = 1;

  std::vector<std::string> violations() const;
  // Throws InvalidSpec.
  void validate() const;

  double recoil_in() const { return bs_in.recoil.value_or(recoil); }
  double recoil_out() const;
  // Output splitter actually applied (the identity splitter when absent).
  BeamSplitterSpec effective_bs_out() const;
};

struct OutputProbabilities {
  double p3 = 0.0;
  double p4 = 0.0;
};

// One product term of the factorized output state.
struct Branch {
  int port = 0;  // 0 -> output port 3, 1 -> output port 4
  Complex amplitude;
  double bs_in_offset = 0.0;
  double bs_out_offset = 0.0;
  Eigen::Vector2cd pointer = Eigen::Vector2cd(1.0, 0.0);
};

class InterferometerState {
 public:
  InterferometerState(std::vector<Branch> branches, Wavepacket bs_in_packet, Wavepacket bs_out_packet);

  const std::vector<Branch>& branches() const { return branches_; }
  const Wavepacket& bs_in_packet() const { return bs_in_packet_; }
  const Wavepacket& bs_out_packet() const { return bs_out_packet_; }

  // Inner product of branch a with branch b (zero across ports).
  Complex branch_overlap(std::size_t a, std::size_t b) const;

  double squared_norm() const;
  double port_probability(int port) const;

  // <p> of the reduced state of one beam splitter (0 = bs_in, 1 = bs_out),
  // optionally restricted to one output port (unnormalized weight returned
  // alongside).
  struct MomentumMoment {
    double weight = 0.0;
    double mean = 0.0;
  };
  MomentumMoment mean_momentum(int beam_splitter, std::optional<int> port = std::nullopt) const;

  // Every branch multiplied by one phase factor.
  InterferometerState with_global_phase(Complex phase) const;

  Layout layout() const;
  // Dense amplitudes; only sensible for small grids.
  CompositeState dense() const;

 private:
  const Wavepacket& shifted(int beam_splitter, std::size_t branch) const;

  std::vector<Branch> branches_;
  Wavepacket bs_in_packet_;
  Wavepacket bs_out_packet_;
  // shifted_[k][b]: packet of BS k as carried by branch b.
  std::array<std::vector<Wavepacket>, 2> shifted_;
};

struct PathCoefficients {
  // Port amplitudes with every translation operator replaced by its
  // expectation value and the detector branch by gamma (global exp(i phi/2)
  // included).
  Complex c1;
  Complex c2;
  // Port probabilities in the interference-term form: direct terms plus the
  // cross term carrying the expectation value of the relative translation
  // and the pointer overlap.
  double p3 = 0.0;
  double p4 = 0.0;
};

struct BeamSplitterMomentum {
  // <p> after evolution minus <p> of the initial packet.
  double mean_shift = 0.0;
  std::optional<double> mean_shift_port3;
  std::optional<double> mean_shift_port4;
  // |<psi|psi shifted by the recoil>|.
  double recoil_overlap = 1.0;
};

struct MomentumTransferReport {
  BeamSplitterMomentum bs_in;
  BeamSplitterMomentum bs_out;
};

// Factorized single-photon evolution. Throws InvalidSpec and the wavepacket
// guard errors.
InterferometerState evolve(const InterferometerConfig& config);

// Reference evolution on the dense composite array, one stage at a time.
// Cost is quadratic in the grid size; intended for small grids.
CompositeState evolve_dense(const InterferometerConfig& config);

OutputProbabilities output_probabilities(const InterferometerConfig& config);

PathCoefficients path_coefficients(const InterferometerConfig& config);

// Fringe visibility of p3 over n_phase uniform phases in [0, 2 pi); the
// config's own phase is ignored. Throws InvalidSpec when n_phase < 8.
double visibility(const InterferometerConfig& config, int n_phase = 360);

MomentumTransferReport momentum_transfer_report(const InterferometerConfig& config);

}  // namespace wwsim
