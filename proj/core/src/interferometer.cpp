#include "wwsim/interferometer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wwsim/error.hpp"
#include "wwsim/tolerance.hpp"

namespace wwsim {

namespace {

constexpr std::size_t max_dense_entries = std::size_t{1} << 20;

const Eigen::Vector2cd unfired(1.0, 0.0);

Eigen::Vector2cd fired(double gamma) { return {gamma, std::sqrt(std::max(0.0, 1.0 - gamma * gamma))}; }

Complex phase_factor(double angle) { return std::polar(1.0, angle); }

// Internal arm that the photon reaches by reflection at the input splitter.
int reflected_arm(int input_port) { return input_port == 1 ? 1 : 0; }

std::optional<int> monitored_arm(const InterferometerConfig& config) {
  if (!config.ww) return std::nullopt;
  const int reflected = reflected_arm(config.input_port);
  return config.ww->arm == Arm::reflected ? reflected : 1 - reflected;
}

Wavepacket packet_of(const BeamSplitterSpec& bs) {
  return gaussian(bs.packet.grid(), bs.packet.p0, bs.packet.sigma);
}

}  // namespace

// ---------------------------------------------------------------------------
// configuration

std::vector<std::string> BeamSplitterSpec::violations() const {
  std::vector<std::string> out;
  const double u = std::norm(t) + std::norm(r);
  if (std::abs(u - 1.0) > tolerance::norm) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "|t|^2 + |r|^2 = " << u << " violates unitarity (must be 1)";
    out.push_back(msg.str());
  }
  if (!(packet.sigma > 0.0)) out.emplace_back("packet sigma must be positive");
  if (packet.half_span < 8.0) out.emplace_back("packet grid must span at least +/- 8 sigma");
  if (packet.n_points < 8) out.emplace_back("packet grid needs at least 8 points");
  if (recoil && !std::isfinite(*recoil)) out.emplace_back("recoil must be finite");
  return out;
}

std::vector<std::string> InterferometerConfig::violations() const {
  std::vector<std::string> out;
  for (const auto& v : bs_in.violations()) out.push_back("bs_in: " + v);
  if (bs_out)
    for (const auto& v : bs_out->violations()) out.push_back("bs_out: " + v);
  if (input_port != 1 && input_port != 2) out.emplace_back("input_port must be 1 or 2");
  if (!std::isfinite(phase)) out.emplace_back("phase must be finite");
  if (!std::isfinite(recoil)) out.emplace_back("recoil must be finite");
  if (ww && !(ww->gamma >= 0.0 && ww->gamma <= 1.0)) out.emplace_back("ww: gamma must lie in [0, 1]");

  const auto guard = [&](const char* name, const BeamSplitterSpec& bs, double dp) {
    if (std::abs(dp) >= 2.0 * bs.packet.half_span * bs.packet.sigma / 4.0)
      out.push_back(std::string(name) + ": recoil exceeds a quarter of the momentum grid span");
  };
  guard("bs_in", bs_in, recoil_in());
  if (bs_out) guard("bs_out", *bs_out, recoil_out());
  return out;
}

void InterferometerConfig::validate() const {
  const auto v = violations();
  if (!v.empty()) throw InvalidSpec(v.front());
}

double InterferometerConfig::recoil_out() const {
  return bs_out && bs_out->recoil ? *bs_out->recoil : recoil;
}

BeamSplitterSpec InterferometerConfig::effective_bs_out() const {
  if (bs_out) return *bs_out;
  BeamSplitterSpec identity;
  identity.t = 1.0;
  identity.r = 0.0;
  identity.packet = bs_in.packet;
  return identity;
}

// ---------------------------------------------------------------------------
// factorized state

InterferometerState::InterferometerState(std::vector<Branch> branches, Wavepacket bs_in_packet,
                                         Wavepacket bs_out_packet)
    : branches_(std::move(branches)),
      bs_in_packet_(std::move(bs_in_packet)),
      bs_out_packet_(std::move(bs_out_packet)) {
  for (const auto& b : branches_) {
    shifted_[0].push_back(shift(bs_in_packet_, b.bs_in_offset));
    shifted_[1].push_back(shift(bs_out_packet_, b.bs_out_offset));
  }
}

const Wavepacket& InterferometerState::shifted(int beam_splitter, std::size_t branch) const {
  return shifted_[static_cast<std::size_t>(beam_splitter)][branch];
}

Complex InterferometerState::branch_overlap(std::size_t a, std::size_t b) const {
  const Branch& x = branches_[a];
  const Branch& y = branches_[b];
  if (x.port != y.port) return 0.0;
  return std::conj(x.amplitude) * y.amplitude * overlap(shifted(0, a), shifted(0, b)) *
         overlap(shifted(1, a), shifted(1, b)) * x.pointer.dot(y.pointer);
}

double InterferometerState::squared_norm() const {
  Complex acc = 0.0;
  for (std::size_t a = 0; a < branches_.size(); ++a)
    for (std::size_t b = 0; b < branches_.size(); ++b) acc += branch_overlap(a, b);
  return acc.real();
}

double InterferometerState::port_probability(int port) const {
  Complex acc = 0.0;
  for (std::size_t a = 0; a < branches_.size(); ++a)
    for (std::size_t b = 0; b < branches_.size(); ++b)
      if (branches_[a].port == port) acc += branch_overlap(a, b);
  return acc.real();
}

InterferometerState::MomentumMoment InterferometerState::mean_momentum(int beam_splitter,
                                                                        std::optional<int> port) const {
  const int other = 1 - beam_splitter;
  Complex weight = 0.0;
  Complex first = 0.0;
  for (std::size_t a = 0; a < branches_.size(); ++a)
    for (std::size_t b = 0; b < branches_.size(); ++b) {
      const Branch& x = branches_[a];
      const Branch& y = branches_[b];
      if (x.port != y.port || (port && x.port != *port)) continue;
      const Complex common = std::conj(x.amplitude) * y.amplitude * x.pointer.dot(y.pointer) *
                             overlap(shifted(other, a), shifted(other, b));
      weight += common * overlap(shifted(beam_splitter, a), shifted(beam_splitter, b));
      first += common * momentum_element(shifted(beam_splitter, a), shifted(beam_splitter, b));
    }
  MomentumMoment m;
  m.weight = weight.real();
  m.mean = m.weight > 0.0 ? first.real() / m.weight : 0.0;
  return m;
}

InterferometerState InterferometerState::with_global_phase(Complex phase) const {
  auto branches = branches_;
  for (auto& b : branches) b.amplitude *= phase;
  return InterferometerState(std::move(branches), bs_in_packet_, bs_out_packet_);
}

Layout InterferometerState::layout() const {
  return Layout({{"path", 2},
                 {"bs_in", bs_in_packet_.grid().n_points},
                 {"bs_out", bs_out_packet_.grid().n_points},
                 {"ww", 2}});
}

CompositeState InterferometerState::dense() const {
  Layout layout = this->layout();
  if (layout.size() > max_dense_entries) throw InvalidSpec("composite space too large for a dense state");
  const auto n1 = static_cast<Eigen::Index>(layout[1].dimension);
  const auto n2 = static_cast<Eigen::Index>(layout[2].dimension);
  const double w1 = std::sqrt(bs_in_packet_.grid().spacing());
  const double w2 = std::sqrt(bs_out_packet_.grid().spacing());

  Amplitudes amps = Amplitudes::Zero(static_cast<Eigen::Index>(layout.size()));
  for (std::size_t b = 0; b < branches_.size(); ++b) {
    const Branch& br = branches_[b];
    const Amplitudes& s1 = shifted(0, b).samples();
    const Amplitudes& s2 = shifted(1, b).samples();
    for (Eigen::Index i = 0; i < n1; ++i)
      for (Eigen::Index j = 0; j < n2; ++j) {
        const Complex c = br.amplitude * s1[i] * w1 * s2[j] * w2;
        const Eigen::Index base = ((br.port * n1 + i) * n2 + j) * 2;
        amps[base] += c * br.pointer[0];
        amps[base + 1] += c * br.pointer[1];
      }
  }
  return CompositeState(std::move(layout), std::move(amps));
}

// ---------------------------------------------------------------------------
// evolution

InterferometerState evolve(const InterferometerConfig& config) {
  config.validate();
  const BeamSplitterSpec out_bs = config.effective_bs_out();
  const Complex t1 = config.bs_in.t, r1 = config.bs_in.r;
  const Complex t2 = out_bs.t, r2 = out_bs.r;
  const double dp1 = config.recoil_in();
  const double dp2 = config.recoil_out();

  struct ArmTerm {
    Complex amplitude;
    double bs_in_offset = 0.0;
    Eigen::Vector2cd pointer = unfired;
  };
  std::array<ArmTerm, 2> arms;

  // Input splitter.
  if (config.input_port == 1) {
    arms[0] = {std::conj(t1), 0.0};
    arms[1] = {-r1, -dp1};
  } else {
    arms[0] = {std::conj(r1), +dp1};
    arms[1] = {t1, 0.0};
  }

  // Which-way marker on the monitored arm.
  if (auto arm = monitored_arm(config)) arms[static_cast<std::size_t>(*arm)].pointer = fired(config.ww->gamma);

  // Path-length difference.
  arms[0].amplitude *= phase_factor(config.phase);

  // Output splitter.
  std::vector<Branch> branches;
  const auto emit = [&](int port, const ArmTerm& arm, Complex coefficient, double bs_out_offset) {
    const Complex amplitude = coefficient * arm.amplitude;
    if (amplitude == Complex(0.0)) return;
    branches.push_back({port, amplitude, arm.bs_in_offset, bs_out_offset, arm.pointer});
  };
  emit(0, arms[0], std::conj(t2), 0.0);
  emit(1, arms[0], -r2, +dp2);
  emit(0, arms[1], std::conj(r2), -dp2);
  emit(1, arms[1], t2, 0.0);

  return InterferometerState(std::move(branches), packet_of(config.bs_in), packet_of(out_bs));
}

namespace {

// Dense tensor over (path, bs_in, bs_out, ww) as a flat row-major array.
class DenseField {
 public:
  DenseField(std::size_t n1, std::size_t n2)
      : n1_(static_cast<Eigen::Index>(n1)), n2_(static_cast<Eigen::Index>(n2)), data_(Amplitudes::Zero(2 * n1_ * n2_ * 2)) {}

  Eigen::Index slice_size() const { return n1_ * n2_ * 2; }
  Amplitudes slice(int path) const { return data_.segment(path * slice_size(), slice_size()); }
  void set_slice(int path, const Amplitudes& s) { data_.segment(path * slice_size(), slice_size()) = s; }
  Amplitudes& data() { return data_; }

  Eigen::Index index(Eigen::Index i, Eigen::Index j, Eigen::Index w) const { return (i * n2_ + j) * 2 + w; }

  // Translates one path slice along the bs_in (axis 1) or bs_out (axis 2) grid.
  Amplitudes translate(const Amplitudes& slice, int axis, double samples_shift) const {
    if (samples_shift == 0.0) return slice;
    Amplitudes out(slice.size());
    const Eigen::Index len = axis == 1 ? n1_ : n2_;
    const Eigen::Index others = axis == 1 ? n2_ : n1_;
    Amplitudes fiber(len);
    for (Eigen::Index o = 0; o < others; ++o)
      for (Eigen::Index w = 0; w < 2; ++w) {
        for (Eigen::Index k = 0; k < len; ++k) fiber[k] = slice[axis == 1 ? index(k, o, w) : index(o, k, w)];
        const Amplitudes moved = spectral_shift(fiber, samples_shift);
        for (Eigen::Index k = 0; k < len; ++k) out[axis == 1 ? index(k, o, w) : index(o, k, w)] = moved[k];
      }
    return out;
  }

 private:
  Eigen::Index n1_, n2_;
  Amplitudes data_;
};

// One entry of a 2x2 path map: coefficient times a translation of one grid.
struct PathEntry {
  Complex coefficient;
  int axis = 1;
  double samples_shift = 0.0;
};

void apply_path_map(DenseField& field, const std::array<std::array<PathEntry, 2>, 2>& map) {
  const Amplitudes in0 = field.slice(0);
  const Amplitudes in1 = field.slice(1);
  for (int out = 0; out < 2; ++out) {
    const auto& row = map[static_cast<std::size_t>(out)];
    Amplitudes acc = row[0].coefficient * field.translate(in0, row[0].axis, row[0].samples_shift);
    acc += row[1].coefficient * field.translate(in1, row[1].axis, row[1].samples_shift);
    field.set_slice(out, acc);
  }
}

}  // namespace

CompositeState evolve_dense(const InterferometerConfig& config) {
  config.validate();
  const BeamSplitterSpec out_bs = config.effective_bs_out();
  const Wavepacket psi1 = packet_of(config.bs_in);
  const Wavepacket psi2 = packet_of(out_bs);
  const std::size_t n1 = psi1.grid().n_points;
  const std::size_t n2 = psi2.grid().n_points;
  if (2 * n1 * n2 * 2 > max_dense_entries) throw InvalidSpec("composite space too large for a dense state");

  const double s1 = config.recoil_in() / psi1.grid().spacing();
  const double s2 = config.recoil_out() / psi2.grid().spacing();

  DenseField field(n1, n2);
  {
    const int path = config.input_port - 1;
    Amplitudes slice = Amplitudes::Zero(field.slice_size());
    const double w = std::sqrt(psi1.grid().spacing() * psi2.grid().spacing());
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n1); ++i)
      for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(n2); ++j)
        slice[field.index(i, j, 0)] = psi1.samples()[i] * psi2.samples()[j] * w;
    field.set_slice(path, slice);
  }

  // Input splitter: |port1> -> t1*|b1> - r1 E-|b2>, |port2> -> r1* E+|b1> + t1|b2>.
  const Complex t1 = config.bs_in.t, r1 = config.bs_in.r;
  apply_path_map(field, {{{{{std::conj(t1), 1, 0.0}, {std::conj(r1), 1, +s1}}},
                          {{{-r1, 1, -s1}, {t1, 1, 0.0}}}}});

  // Detector: rotation of the pointer conditioned on the monitored arm.
  if (auto arm = monitored_arm(config)) {
    const double g = config.ww->gamma;
    const double s = std::sqrt(std::max(0.0, 1.0 - g * g));
    Amplitudes slice = field.slice(*arm);
    for (Eigen::Index k = 0; k < slice.size(); k += 2) {
      const Complex u = slice[k], f = slice[k + 1];
      slice[k] = g * u - s * f;
      slice[k + 1] = s * u + g * f;
    }
    field.set_slice(*arm, slice);
  }

  field.set_slice(0, field.slice(0) * phase_factor(config.phase));

  // Output splitter: |b1> -> t2*|3> - r2 E+|4>, |b2> -> r2* E-|3> + t2|4>.
  const Complex t2 = out_bs.t, r2 = out_bs.r;
  apply_path_map(field, {{{{{std::conj(t2), 2, 0.0}, {std::conj(r2), 2, -s2}}},
                          {{{-r2, 2, +s2}, {t2, 2, 0.0}}}}});

  Layout layout({{"path", 2}, {"bs_in", n1}, {"bs_out", n2}, {"ww", 2}});
  return CompositeState(std::move(layout), std::move(field.data()));
}

// ---------------------------------------------------------------------------
// observables

OutputProbabilities output_probabilities(const InterferometerConfig& config) {
  const InterferometerState state = evolve(config);
  return {state.port_probability(0), state.port_probability(1)};
}

PathCoefficients path_coefficients(const InterferometerConfig& config) {
  config.validate();
  const BeamSplitterSpec out_bs = config.effective_bs_out();
  const Complex t1 = config.bs_in.t, r1 = config.bs_in.r;
  const Complex t2 = out_bs.t, r2 = out_bs.r;
  const double dp1 = config.recoil_in();
  const double dp2 = config.recoil_out();
  const Complex e = phase_factor(config.phase);

  const Wavepacket psi1 = packet_of(config.bs_in);
  const Wavepacket psi2 = packet_of(out_bs);
  // Expectation value of a translation by d.
  const auto omega1 = [&](double d) { return overlap(psi1, shift(psi1, d)); };
  const auto omega2 = [&](double d) { return overlap(psi2, shift(psi2, d)); };

  // A route through one arm: scalar coefficient, translations of BS_in and
  // BS_out (as offsets), and whether it passes the detector.
  struct Route {
    Complex coefficient;
    double bs_in_offset;
    double bs_out_offset;
    bool reflected;
  };
  // Rows of the composed transform, ordered (port 3, port 4) and, within a
  // port, (arm reached by transmission, arm reached by reflection).
  std::array<std::array<Route, 2>, 2> routes;
  if (config.input_port == 1) {
    routes[0] = {{{std::conj(t1) * std::conj(t2) * e, 0.0, 0.0, false}, {-r1 * std::conj(r2), -dp1, -dp2, true}}};
    routes[1] = {{{-std::conj(t1) * r2 * e, 0.0, +dp2, false}, {-r1 * t2, -dp1, 0.0, true}}};
  } else {
    routes[0] = {{{t1 * std::conj(r2), 0.0, -dp2, false}, {std::conj(r1) * std::conj(t2) * e, +dp1, 0.0, true}}};
    routes[1] = {{{t1 * t2, 0.0, 0.0, false}, {-std::conj(r1) * r2 * e, +dp1, +dp2, true}}};
  }

  const bool detector = config.ww.has_value();
  const double gamma = detector ? config.ww->gamma : 1.0;
  const auto marked = [&](const Route& route) {
    if (!detector) return false;
    return (config.ww->arm == Arm::reflected) == route.reflected;
  };

  PathCoefficients out;
  std::array<double, 2> probability{};
  std::array<Complex, 2> amplitude{};
  for (std::size_t port = 0; port < 2; ++port) {
    const Route& a = routes[port][0];
    const Route& b = routes[port][1];
    for (const Route* route : {&a, &b})
      amplitude[port] += route->coefficient * omega1(route->bs_in_offset) * omega2(route->bs_out_offset) *
                         (marked(*route) ? gamma : 1.0);

    const Complex cross = std::conj(a.coefficient) * b.coefficient * omega1(b.bs_in_offset - a.bs_in_offset) *
                          omega2(b.bs_out_offset - a.bs_out_offset) *
                          (marked(a) != marked(b) ? gamma : 1.0);
    probability[port] = std::norm(a.coefficient) + std::norm(b.coefficient) + 2.0 * cross.real();
  }
  out.c1 = amplitude[0];
  out.c2 = amplitude[1];
  out.p3 = probability[0];
  out.p4 = probability[1];
  return out;
}

double visibility(const InterferometerConfig& config, int n_phase) {
  if (n_phase < 8) throw InvalidSpec("visibility needs at least 8 phase points");
  InterferometerConfig swept = config;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_phase; ++k) {
    swept.phase = 2.0 * std::numbers::pi * k / n_phase;
    const double p3 = output_probabilities(swept).p3;
    lo = std::min(lo, p3);
    hi = std::max(hi, p3);
  }
  if (hi + lo < 1e-12) return 0.0;
  return (hi - lo) / (hi + lo);
}

MomentumTransferReport momentum_transfer_report(const InterferometerConfig& config) {
  const InterferometerState state = evolve(config);
  const std::array<double, 2> recoil{config.recoil_in(), config.recoil_out()};
  const std::array<const Wavepacket*, 2> initial{&state.bs_in_packet(), &state.bs_out_packet()};

  MomentumTransferReport report;
  for (int k = 0; k < 2; ++k) {
    const Wavepacket& psi = *initial[static_cast<std::size_t>(k)];
    const double before = psi.mean_momentum();
    BeamSplitterMomentum m;
    m.mean_shift = state.mean_momentum(k).mean - before;
    for (int port = 0; port < 2; ++port) {
      const auto conditioned = state.mean_momentum(k, port);
      if (conditioned.weight < tolerance::degenerate_probability) continue;
      (port == 0 ? m.mean_shift_port3 : m.mean_shift_port4) = conditioned.mean - before;
    }
    m.recoil_overlap = std::abs(overlap(psi, shift(psi, recoil[static_cast<std::size_t>(k)])));
    (k == 0 ? report.bs_in : report.bs_out) = m;
  }
  return report;
}

}  // namespace wwsim
