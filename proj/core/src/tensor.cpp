#include "wwsim/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Eigenvalues>

#include "wwsim/error.hpp"
#include "wwsim/tolerance.hpp"

namespace wwsim {

Layout::Layout(std::vector<SubsystemSpec> subsystems) : subsystems_(std::move(subsystems)) {
  std::set<std::string_view> seen;
  for (const auto& s : subsystems_) {
    if (s.dimension < 1) throw InvalidState("subsystem '" + s.name + "' has dimension 0");
    if (!seen.insert(s.name).second) throw NameCollision("subsystem name '" + s.name + "' repeats");
  }
  strides_.assign(subsystems_.size(), 1);
  size_ = 1;
  for (std::size_t axis = subsystems_.size(); axis-- > 0;) {
    strides_[axis] = size_;
    size_ *= subsystems_[axis].dimension;
  }
}

bool Layout::contains(std::string_view name) const {
  return std::any_of(subsystems_.begin(), subsystems_.end(),
                     [&](const SubsystemSpec& s) { return s.name == name; });
}

std::size_t Layout::axis_of(std::string_view name) const {
  for (std::size_t axis = 0; axis < subsystems_.size(); ++axis)
    if (subsystems_[axis].name == name) return axis;
  throw UnknownSubsystem("no subsystem named '" + std::string(name) + "'");
}

std::size_t Layout::flatten(std::span<const std::size_t> index) const {
  std::size_t flat = 0;
  for (std::size_t axis = 0; axis < index.size(); ++axis) flat += index[axis] * strides_[axis];
  return flat;
}

std::vector<std::size_t> Layout::unflatten(std::size_t flat) const {
  std::vector<std::size_t> index(subsystems_.size());
  for (std::size_t axis = 0; axis < subsystems_.size(); ++axis) {
    index[axis] = flat / strides_[axis];
    flat %= strides_[axis];
  }
  return index;
}

Layout Layout::select(std::span<const std::size_t> axes) const {
  std::vector<SubsystemSpec> picked;
  picked.reserve(axes.size());
  for (auto axis : axes) picked.push_back(subsystems_.at(axis));
  return Layout(std::move(picked));
}

// ---------------------------------------------------------------------------

CompositeState::CompositeState(Layout layout, Amplitudes amplitudes, bool normalized)
    : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)), normalized_(normalized) {
  if (static_cast<std::size_t>(amplitudes_.size()) != layout_.size())
    throw DimensionMismatch("amplitude count " + std::to_string(amplitudes_.size()) +
                            " does not match composite dimension " + std::to_string(layout_.size()));
  if (normalized_ && std::abs(amplitudes_.squaredNorm() - 1.0) > tolerance::norm)
    throw InvalidState("state flagged normalized has squared norm " +
                       std::to_string(amplitudes_.squaredNorm()));
}

CompositeState CompositeState::on(std::string name, Amplitudes amplitudes) {
  const auto dim = static_cast<std::size_t>(amplitudes.size());
  return CompositeState(Layout({{std::move(name), dim}}), std::move(amplitudes));
}

CompositeState CompositeState::basis(Layout layout, std::size_t flat_index) {
  Amplitudes amps = Amplitudes::Zero(static_cast<Eigen::Index>(layout.size()));
  amps[static_cast<Eigen::Index>(flat_index)] = 1.0;
  return CompositeState(std::move(layout), std::move(amps), true);
}

// ---------------------------------------------------------------------------

DensityOperator::DensityOperator(Layout layout, Matrix matrix)
    : layout_(std::move(layout)), matrix_(std::move(matrix)) {
  const auto n = static_cast<Eigen::Index>(layout_.size());
  if (matrix_.rows() != n || matrix_.cols() != n)
    throw DimensionMismatch("density matrix side does not match composite dimension");
  if (hermiticity_defect() > tolerance::hermiticity)
    throw InvalidState("density matrix is not Hermitian");
  if (std::abs(matrix_.trace() - Complex(1.0)) > tolerance::trace)
    throw InvalidState("density matrix trace is not 1");
  if (min_eigenvalue() < tolerance::eigenvalue_floor)
    throw InvalidState("density matrix has a negative eigenvalue");
}

DensityOperator DensityOperator::pure(const CompositeState& psi) {
  const double sq = psi.squared_norm();
  if (sq < tolerance::zero_norm * tolerance::zero_norm) throw ZeroNorm("projector of a null state");
  Matrix m = psi.amplitudes() * psi.amplitudes().adjoint() / sq;
  return DensityOperator(psi.layout(), std::move(m));
}

double DensityOperator::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double DensityOperator::hermiticity_defect() const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------

namespace {

Layout concatenate(const Layout& a, const Layout& b) {
  auto subsystems = a.subsystems();
  subsystems.insert(subsystems.end(), b.subsystems().begin(), b.subsystems().end());
  return Layout(std::move(subsystems));
}

}  // namespace

CompositeState tensor(const CompositeState& a, const CompositeState& b) {
  Layout layout = concatenate(a.layout(), b.layout());
  const auto nb = b.amplitudes().size();
  Amplitudes amps(a.amplitudes().size() * nb);
  for (Eigen::Index i = 0; i < a.amplitudes().size(); ++i)
    amps.segment(i * nb, nb) = a.amplitudes()[i] * b.amplitudes();
  return CompositeState(std::move(layout), std::move(amps), a.normalized() && b.normalized());
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  Layout layout = concatenate(a.layout(), b.layout());
  const auto na = a.matrix().rows();
  const auto nb = b.matrix().rows();
  Matrix m(na * nb, na * nb);
  for (Eigen::Index i = 0; i < na; ++i)
    for (Eigen::Index j = 0; j < na; ++j) m.block(i * nb, j * nb, nb, nb) = a.matrix()(i, j) * b.matrix();
  return DensityOperator(std::move(layout), std::move(m));
}

DensityOperator partial_trace(const DensityOperator& rho, std::span<const std::string> keep) {
  if (keep.empty()) throw InvalidState("partial_trace needs at least one kept subsystem");
  const Layout& layout = rho.layout();

  std::vector<bool> kept(layout.rank(), false);
  for (const auto& name : keep) kept[layout.axis_of(name)] = true;

  std::vector<std::size_t> kept_axes, traced_axes;
  for (std::size_t axis = 0; axis < layout.rank(); ++axis)
    (kept[axis] ? kept_axes : traced_axes).push_back(axis);

  const Layout kept_layout = layout.select(kept_axes);
  const Layout traced_layout = layout.select(traced_axes);

  // flat_of[t * K + k] = flat index of the full basis state (k, t).
  const std::size_t K = kept_layout.size();
  const std::size_t T = traced_layout.size();
  std::vector<std::size_t> flat_of(K * T);
  std::vector<std::size_t> kidx(kept_axes.size()), tidx(traced_axes.size());
  for (std::size_t flat = 0; flat < layout.size(); ++flat) {
    const auto index = layout.unflatten(flat);
    for (std::size_t i = 0; i < kept_axes.size(); ++i) kidx[i] = index[kept_axes[i]];
    for (std::size_t i = 0; i < traced_axes.size(); ++i) tidx[i] = index[traced_axes[i]];
    flat_of[traced_layout.flatten(tidx) * K + kept_layout.flatten(kidx)] = flat;
  }

  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(K));
  const Matrix& m = rho.matrix();
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t* row = &flat_of[t * K];
    for (std::size_t i = 0; i < K; ++i)
      for (std::size_t j = 0; j < K; ++j)
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
            m(static_cast<Eigen::Index>(row[i]), static_cast<Eigen::Index>(row[j]));
  }
  return DensityOperator(kept_layout, std::move(out));
}

CompositeState project(const CompositeState& psi, std::string_view subsystem, const Amplitudes& ket) {
  const Layout& layout = psi.layout();
  const std::size_t axis = layout.axis_of(subsystem);
  const std::size_t dim = layout[axis].dimension;
  if (static_cast<std::size_t>(ket.size()) != dim)
    throw DimensionMismatch("ket length " + std::to_string(ket.size()) + " does not match subsystem '" +
                            std::string(subsystem) + "' of dimension " + std::to_string(dim));

  std::vector<std::size_t> rest;
  for (std::size_t a = 0; a < layout.rank(); ++a)
    if (a != axis) rest.push_back(a);
  Layout rest_layout = layout.select(rest);

  // Row-major: flat = outer * (dim * stride) + k * stride + inner.
  const std::size_t stride = layout.stride(axis);
  const std::size_t outer_count = layout.size() / (dim * stride);
  Amplitudes out = Amplitudes::Zero(static_cast<Eigen::Index>(rest_layout.size()));
  for (std::size_t outer = 0; outer < outer_count; ++outer)
    for (std::size_t inner = 0; inner < stride; ++inner) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k < dim; ++k)
        acc += std::conj(ket[static_cast<Eigen::Index>(k)]) * psi[outer * dim * stride + k * stride + inner];
      out[static_cast<Eigen::Index>(outer * stride + inner)] = acc;
    }
  return CompositeState(std::move(rest_layout), std::move(out));
}

Complex inner_product(const CompositeState& a, const CompositeState& b) {
  if (!(a.layout() == b.layout())) throw DimensionMismatch("inner product of states on different spaces");
  return a.amplitudes().dot(b.amplitudes());
}

NormalizedState normalize(const CompositeState& psi) {
  const double n = psi.norm();
  if (n < tolerance::zero_norm) throw ZeroNorm("cannot normalize a null state");
  return {CompositeState(psi.layout(), psi.amplitudes() / n, true), n};
}

double purity(const DensityOperator& rho) {
  // Tr(rho^2) = sum_ij |rho_ij|^2 for Hermitian rho.
  return rho.matrix().squaredNorm();
}

CompositeState permute(const CompositeState& psi, std::span<const std::string> order) {
  const Layout& from = psi.layout();
  if (order.size() != from.rank()) throw DimensionMismatch("permutation must name every subsystem");
  std::vector<std::size_t> axes;
  for (const auto& name : order) axes.push_back(from.axis_of(name));
  Layout to = from.select(axes);

  Amplitudes out(psi.amplitudes().size());
  std::vector<std::size_t> target(axes.size());
  for (std::size_t flat = 0; flat < from.size(); ++flat) {
    const auto index = from.unflatten(flat);
    for (std::size_t i = 0; i < axes.size(); ++i) target[i] = index[axes[i]];
    out[static_cast<Eigen::Index>(to.flatten(target))] = psi[flat];
  }
  return CompositeState(std::move(to), std::move(out), psi.normalized());
}

}  // namespace wwsim
