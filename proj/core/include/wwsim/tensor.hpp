#pragma once

// Dense complex linear algebra over named tensor-product spaces.
//
// Every composite space is an ordered list of named subsystems. Amplitudes
// are laid out row-major over that list: the last subsystem varies fastest.
// All index arithmetic goes through Layout.

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace wwsim {

using Complex = std::complex<double>;
using Amplitudes = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

struct SubsystemSpec {
  std::string name;
  std::size_t dimension = 1;

  friend bool operator==(const SubsystemSpec&, const SubsystemSpec&) = default;
};

class Layout {
 public:
  Layout() = default;

  // Throws NameCollision on repeated names, InvalidState on a zero dimension.
  explicit Layout(std::vector<SubsystemSpec> subsystems);

  std::size_t rank() const { return subsystems_.size(); }
  std::size_t size() const { return size_; }
  const SubsystemSpec& operator[](std::size_t axis) const { return subsystems_[axis]; }
  const std::vector<SubsystemSpec>& subsystems() const { return subsystems_; }
  std::size_t stride(std::size_t axis) const { return strides_[axis]; }

  bool contains(std::string_view name) const;
  // Throws UnknownSubsystem.
  std::size_t axis_of(std::string_view name) const;

  std::size_t flatten(std::span<const std::size_t> index) const;
  std::vector<std::size_t> unflatten(std::size_t flat) const;

  // Layout of the given axes, in the given order.
  Layout select(std::span<const std::size_t> axes) const;

  friend bool operator==(const Layout& a, const Layout& b) {
    return a.subsystems_ == b.subsystems_;
  }

 private:
  std::vector<SubsystemSpec> subsystems_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
};

class CompositeState {
 public:
  // Throws DimensionMismatch if the amplitude count does not match the
  // layout, InvalidState if `normalized` is claimed but the norm is off.
  CompositeState(Layout layout, Amplitudes amplitudes, bool normalized = false);

  // Single-subsystem state.
  static CompositeState on(std::string name, Amplitudes amplitudes);
  static CompositeState basis(Layout layout, std::size_t flat_index);

  const Layout& layout() const { return layout_; }
  const Amplitudes& amplitudes() const { return amplitudes_; }
  bool normalized() const { return normalized_; }
  Complex operator[](std::size_t flat) const { return amplitudes_[static_cast<Eigen::Index>(flat)]; }

  double norm() const { return amplitudes_.norm(); }
  double squared_norm() const { return amplitudes_.squaredNorm(); }

 private:
  Layout layout_;
  Amplitudes amplitudes_;
  bool normalized_ = false;
};

class DensityOperator {
 public:
  // Validates Hermiticity, unit trace and positivity; throws InvalidState.
  DensityOperator(Layout layout, Matrix matrix);

  // |psi><psi| / <psi|psi>.
  static DensityOperator pure(const CompositeState& psi);

  const Layout& layout() const { return layout_; }
  const Matrix& matrix() const { return matrix_; }

  Complex trace() const { return matrix_.trace(); }
  double min_eigenvalue() const;
  double hermiticity_defect() const;

 private:
  Layout layout_;
  Matrix matrix_;
};

// Outer product over the concatenated subsystem list. Throws NameCollision.
CompositeState tensor(const CompositeState& a, const CompositeState& b);
DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);

// Reduced operator on `keep` (listed in rho's own subsystem order).
// Throws UnknownSubsystem; InvalidState if keep is empty.
DensityOperator partial_trace(const DensityOperator& rho, std::span<const std::string> keep);

// <ket|psi> on `subsystem`, unnormalized, over the remaining subsystems.
// Throws UnknownSubsystem, DimensionMismatch.
CompositeState project(const CompositeState& psi, std::string_view subsystem, const Amplitudes& ket);

// Throws DimensionMismatch when the layouts differ.
Complex inner_product(const CompositeState& a, const CompositeState& b);

struct NormalizedState {
  CompositeState state;
  double original_norm;
};
// Throws ZeroNorm below tolerance::zero_norm.
NormalizedState normalize(const CompositeState& psi);

double purity(const DensityOperator& rho);

// Reorders subsystems to `order` (a permutation of the current names).
CompositeState permute(const CompositeState& psi, std::span<const std::string> order);

}  // namespace wwsim
