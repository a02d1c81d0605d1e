#include "wwsim/collapse.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "wwsim/error.hpp"
#include "wwsim/tolerance.hpp"

namespace wwsim {

namespace {

// Max entrywise deviation of the Gram matrix from the identity.
double orthonormality_defect(const std::vector<Amplitudes>& states) {
  double worst = 0.0;
  for (std::size_t j = 0; j < states.size(); ++j)
    for (std::size_t k = 0; k < states.size(); ++k) {
      const Complex g = states[j].dot(states[k]);
      worst = std::max(worst, std::abs(g - Complex(j == k ? 1.0 : 0.0)));
    }
  return worst;
}

bool uniform_dimension(const std::vector<Amplitudes>& states) {
  for (const auto& s : states)
    if (s.size() != states.front().size()) return false;
  return true;
}

}  // namespace

std::vector<std::string> EntanglementSpec::violations() const {
  std::vector<std::string> out;
  const std::size_t J = amplitudes.size();
  if (J == 0) {
    out.emplace_back("entanglement spec has no branches");
    return out;
  }
  if (system_states.size() != J || apparatus_states.size() != J)
    out.emplace_back("need one system state and one apparatus state per amplitude");
  if (!eigenvalues.empty() && eigenvalues.size() != J)
    out.emplace_back("need one eigenvalue per amplitude");
  if (system_name == apparatus_name) out.emplace_back("system and apparatus need distinct names");

  double total = 0.0;
  for (const auto& a : amplitudes) total += std::norm(a);
  if (std::abs(total - 1.0) > tolerance::norm) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "sum of |a_j|^2 is " << total << ", not 1";
    out.push_back(msg.str());
  }
  if (!out.empty()) return out;

  if (!uniform_dimension(system_states)) out.emplace_back("system states differ in dimension");
  else if (static_cast<std::size_t>(system_states.front().size()) < J)
    out.emplace_back("system dimension is smaller than the number of branches");
  else if (orthonormality_defect(system_states) > tolerance::norm)
    out.emplace_back("system states are not orthonormal");

  if (!uniform_dimension(apparatus_states)) out.emplace_back("apparatus states differ in dimension");
  else if (static_cast<std::size_t>(apparatus_states.front().size()) < J)
    out.emplace_back("apparatus dimension is smaller than the number of branches");
  else if (orthonormality_defect(apparatus_states) > tolerance::norm)
    out.emplace_back("apparatus states are not orthonormal");
  return out;
}

void EntanglementSpec::validate() const {
  const auto v = violations();
  if (!v.empty()) throw InvalidSpec(v.front());
}

EntanglementSpec EntanglementSpec::standard_basis(std::vector<Complex> amplitudes, std::vector<double> eigenvalues) {
  EntanglementSpec spec;
  const auto J = static_cast<Eigen::Index>(amplitudes.size());
  spec.amplitudes = std::move(amplitudes);
  for (Eigen::Index j = 0; j < J; ++j) {
    spec.system_states.push_back(Amplitudes::Unit(J, j));
    spec.apparatus_states.push_back(Amplitudes::Unit(J, j));
  }
  if (eigenvalues.empty())
    for (Eigen::Index j = 0; j < J; ++j) eigenvalues.push_back(static_cast<double>(j + 1));
  spec.eigenvalues = std::move(eigenvalues);
  return spec;
}

CompositeState entangle(const EntanglementSpec& spec) {
  spec.validate();
  const auto ds = static_cast<std::size_t>(spec.system_states.front().size());
  const auto da = static_cast<std::size_t>(spec.apparatus_states.front().size());
  Layout layout({{spec.system_name, ds}, {spec.apparatus_name, da}});

  Amplitudes amps = Amplitudes::Zero(static_cast<Eigen::Index>(layout.size()));
  for (std::size_t j = 0; j < spec.branches(); ++j) {
    const auto& xi = spec.system_states[j];
    const auto& eta = spec.apparatus_states[j];
    for (Eigen::Index s = 0; s < xi.size(); ++s)
      amps.segment(s * eta.size(), eta.size()) += spec.amplitudes[j] * xi[s] * eta;
  }
  return CompositeState(std::move(layout), std::move(amps), true);
}

DensityOperator reduce_statistical(const CompositeState& psi) {
  if (psi.layout().rank() != 2)
    throw DimensionMismatch("statistical reduction expects a (system, apparatus) state");
  const std::string keep[] = {psi.layout()[0].name};
  return partial_trace(DensityOperator::pure(psi), keep);
}

CompositeState fix_global_phase(const CompositeState& psi) {
  Eigen::Index largest = 0;
  psi.amplitudes().cwiseAbs().maxCoeff(&largest);
  const Complex pivot = psi.amplitudes()[largest];
  if (std::abs(pivot) == 0.0) return psi;
  const Complex phase = std::conj(pivot) / std::abs(pivot);
  return CompositeState(psi.layout(), psi.amplitudes() * phase, psi.normalized());
}

CollapseOutcome reduce_postselect(const CompositeState& psi, const EntanglementSpec& spec, std::size_t l) {
  if (psi.layout().rank() != 2) throw DimensionMismatch("post-selection expects a (system, apparatus) state");
  if (l >= spec.apparatus_states.size())
    throw InvalidSpec("outcome " + std::to_string(l) + " is not a declared apparatus state");

  const CompositeState branch = project(psi, psi.layout()[1].name, spec.apparatus_states[l]);
  const double probability = branch.squared_norm();
  if (probability < tolerance::degenerate_probability)
    throw DegenerateOutcome("post-selection on outcome " + std::to_string(l) + " with probability " +
                            std::to_string(probability));

  CollapseOutcome out{l, probability, fix_global_phase(normalize(branch).state),
                      spec.eigenvalues.empty() ? 0.0 : spec.eigenvalues[l]};
  return out;
}

std::vector<double> outcome_probabilities(const CompositeState& psi, const EntanglementSpec& spec) {
  std::vector<double> p;
  p.reserve(spec.apparatus_states.size());
  for (const auto& eta : spec.apparatus_states) p.push_back(project(psi, psi.layout()[1].name, eta).squared_norm());
  return p;
}

EntanglementSpec stern_gerlach_spec(Complex a1, Complex a2) {
  auto spec = EntanglementSpec::standard_basis({a1, a2}, {0.5, -0.5});
  spec.system_name = "spin";
  spec.apparatus_name = "beam";
  return spec;
}

CompositeState stern_gerlach(Complex a1, Complex a2) { return entangle(stern_gerlach_spec(a1, a2)); }

SampleCounts sample_outcomes(const CompositeState& psi, const EntanglementSpec& spec, std::uint64_t shots,
                             std::uint64_t seed) {
  if (shots < 1) throw InvalidSpec("sampling needs at least one shot");
  const auto probs = outcome_probabilities(psi, spec);

  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(probs.begin(), probs.end());
  SampleCounts out{std::vector<std::uint64_t>(probs.size(), 0), shots, seed};
  for (std::uint64_t s = 0; s < shots; ++s) ++out.counts[pick(rng)];
  return out;
}

SampleCounts sample_outcomes(const CompositeState& psi, std::uint64_t shots, std::uint64_t seed) {
  if (psi.layout().rank() != 2) throw DimensionMismatch("sampling expects a (system, apparatus) state");
  const auto dim = static_cast<Eigen::Index>(psi.layout()[1].dimension);
  EntanglementSpec pointers;
  for (Eigen::Index k = 0; k < dim; ++k) pointers.apparatus_states.push_back(Amplitudes::Unit(dim, k));
  return sample_outcomes(psi, pointers, shots, seed);
}

}  // namespace wwsim
