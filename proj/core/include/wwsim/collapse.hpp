#pragma once

// Measurement as entanglement followed by reduction.
//
// A pre-measurement correlates system eigenstates xi_j with orthonormal
// apparatus pointer states eta_j:  psi = sum_j a_j |xi_j>|eta_j>.
// The state is then reduced either statistically (trace over the apparatus,
// leaving the mixture sum_j |a_j|^2 |xi_j><xi_j|) or by post-selection on one
// observed pointer state (leaving the pure state xi_l with probability
// |a_l|^2).

#include <cstdint>
#include <string>
#include <vector>

#include "wwsim/tensor.hpp"

namespace wwsim {

struct EntanglementSpec {
  std::vector<Complex> amplitudes;
  std::vector<Amplitudes> system_states;
  std::vector<Amplitudes> apparatus_states;
  std::vector<double> eigenvalues;

  std::string system_name = "system";
  std::string apparatus_name = "apparatus";

  std::size_t branches() const { return amplitudes.size(); }

  // Human-readable invariant violations; empty when the spec is usable.
  std::vector<std::string> violations() const;
  // Throws InvalidSpec listing the first violation.
  void validate() const;

  // xi_j = e_j, eta_j = e_j in dimension J. Eigenvalues default to 1..J.
  static EntanglementSpec standard_basis(std::vector<Complex> amplitudes,
                                         std::vector<double> eigenvalues = {});
};

struct CollapseOutcome {
  std::size_t index = 0;
  double probability = 0.0;
  CompositeState post_state;
  double eigenvalue = 0.0;
};

struct SampleCounts {
  std::vector<std::uint64_t> counts;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;

  double frequency(std::size_t outcome) const {
    return static_cast<double>(counts.at(outcome)) / static_cast<double>(shots);
  }
};

// sum_j a_j |xi_j> (x) |eta_j> on (system, apparatus). Throws InvalidSpec.
CompositeState entangle(const EntanglementSpec& spec);

// Trace over the second subsystem of a (system, apparatus) state.
DensityOperator reduce_statistical(const CompositeState& psi);

// Post-selects on apparatus state eta_l (0-based). The returned state is
// unit-norm with its largest component made real-positive.
// Throws DegenerateOutcome if the branch probability is below 1e-12.
CollapseOutcome reduce_postselect(const CompositeState& psi, const EntanglementSpec& spec, std::size_t l);

// Probability of each declared apparatus outcome: ||<eta_j|psi>||^2.
std::vector<double> outcome_probabilities(const CompositeState& psi, const EntanglementSpec& spec);

// Spin-1/2 along the quantization axis with beam-direction pointers:
// a1 |+>|phi_+> + a2 |->|phi_->, eigenvalues (+1/2, -1/2).
EntanglementSpec stern_gerlach_spec(Complex a1, Complex a2);
CompositeState stern_gerlach(Complex a1, Complex a2);

// Draws `shots` i.i.d. outcomes from the pointer-state distribution with a
// generator private to the call. Same seed, same counts.
SampleCounts sample_outcomes(const CompositeState& psi, const EntanglementSpec& spec, std::uint64_t shots,
                             std::uint64_t seed);
// Pointer states taken as the apparatus computational basis.
SampleCounts sample_outcomes(const CompositeState& psi, std::uint64_t shots, std::uint64_t seed);

// Multiplies by a global phase so the largest-magnitude amplitude is real and
// positive.
CompositeState fix_global_phase(const CompositeState& psi);

}  // namespace wwsim
