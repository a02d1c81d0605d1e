#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "random_states.hpp"
#include "wwsim/error.hpp"
#include "wwsim/tensor.hpp"

using namespace wwsim;
using wwsim::testing::random_density;
using wwsim::testing::random_unit;

namespace {

const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

Amplitudes vec(std::initializer_list<Complex> xs) {
  Amplitudes a(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (auto x : xs) a[i++] = x;
  return a;
}

double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }
double max_abs_diff(const Amplitudes& a, const Amplitudes& b) { return (a - b).cwiseAbs().maxCoeff(); }

CompositeState bell() {
  return CompositeState(Layout({{"A", 2}, {"B", 2}}), vec({inv_sqrt2, 0, 0, inv_sqrt2}), true);
}

}  // namespace

TEST_SUITE("layout") {
  TEST_CASE("row-major strides put the last subsystem fastest") {
    Layout l({{"a", 2}, {"b", 3}, {"c", 4}});
    CHECK(l.size() == 24);
    CHECK(l.stride(0) == 12);
    CHECK(l.stride(1) == 4);
    CHECK(l.stride(2) == 1);
    const std::size_t idx[] = {1, 2, 3};
    CHECK(l.flatten(idx) == 23);
    CHECK(l.unflatten(17) == std::vector<std::size_t>{1, 1, 1});
  }

  TEST_CASE("names must be unique and dimensions positive") {
    CHECK_THROWS_AS(Layout({{"a", 2}, {"a", 3}}), NameCollision);
    CHECK_THROWS_AS(Layout({{"a", 0}}), InvalidState);
    CHECK_THROWS_AS(Layout({{"a", 2}}).axis_of("b"), UnknownSubsystem);
  }
}

TEST_SUITE("tensor") {
  TEST_CASE("basis product") {
    auto a = CompositeState::on("A", vec({1, 0}));
    auto b = CompositeState::on("B", vec({0, 1}));
    auto ab = tensor(a, b);
    CHECK(ab.layout().rank() == 2);
    CHECK(max_abs_diff(ab.amplitudes(), vec({0, 1, 0, 0})) == 0.0);
  }

  TEST_CASE("linearity") {
    auto a = CompositeState::on("A", vec({inv_sqrt2, inv_sqrt2}));
    auto b = CompositeState::on("B", vec({1, 0}));
    CHECK(max_abs_diff(tensor(a, b).amplitudes(), vec({inv_sqrt2, 0, inv_sqrt2, 0})) < 1e-16);
  }

  TEST_CASE("name collision") {
    auto a = CompositeState::on("A", vec({1, 0}));
    CHECK_THROWS_AS(tensor(a, a), NameCollision);
  }

  TEST_CASE("norm is multiplicative on 100 seeded states") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> dim(1, 6);
    for (int trial = 0; trial < 100; ++trial) {
      auto a = CompositeState::on("A", wwsim::testing::random_amplitudes(rng, dim(rng)));
      auto b = CompositeState::on("B", wwsim::testing::random_amplitudes(rng, dim(rng)));
      // Oracle: explicit double sum over the outer product.
      double sq = 0.0;
      for (auto x : a.amplitudes())
        for (auto y : b.amplitudes()) sq += std::norm(x * y);
      const auto ab = tensor(a, b);
      CHECK(ab.norm() == doctest::Approx(std::sqrt(sq)).epsilon(1e-13));
      CHECK(ab.norm() == doctest::Approx(a.norm() * b.norm()).epsilon(1e-13));
    }
  }

  TEST_CASE("associativity up to reordering") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      auto a = CompositeState::on("a", random_unit(rng, 2));
      auto b = CompositeState::on("b", random_unit(rng, 3));
      auto c = CompositeState::on("c", random_unit(rng, 2));
      auto left = tensor(tensor(a, b), c);
      auto right = tensor(a, tensor(b, c));
      const std::string order[] = {"a", "b", "c"};
      CHECK(max_abs_diff(permute(left, order).amplitudes(), permute(right, order).amplitudes()) < 1e-12);

      // A genuine reordering round-trips.
      const std::string shuffled[] = {"c", "a", "b"};
      auto there = permute(left, shuffled);
      CHECK(there.layout()[0].name == "c");
      CHECK(max_abs_diff(permute(there, order).amplitudes(), left.amplitudes()) == 0.0);
    }
  }
}

TEST_SUITE("partial_trace") {
  TEST_CASE("product state factorizes") {
    std::mt19937_64 rng(3);
    auto ra = random_density(rng, Layout({{"A", 3}}));
    auto rb = random_density(rng, Layout({{"B", 2}}));
    const std::string keep[] = {"A"};
    auto reduced = partial_trace(tensor(ra, rb), keep);
    CHECK(max_abs_diff(reduced.matrix(), ra.matrix()) < 1e-14);
  }

  TEST_CASE("Bell state gives the maximally mixed qubit") {
    const std::string keep[] = {"A"};
    auto reduced = partial_trace(DensityOperator::pure(bell()), keep);
    CHECK(max_abs_diff(reduced.matrix(), 0.5 * Matrix::Identity(2, 2)) < 1e-15);
  }

  TEST_CASE("apparatus trace of a=(0.6, 0.8) leaves diag(0.36, 0.64)") {
    // Hand construction of |psi><psi| with psi = 0.6|00> + 0.8|11>:
    // entries (00,00)=0.36, (00,11)=(11,00)=0.48, (11,11)=0.64. Tracing the
    // second index keeps only the (00,00) and (11,11) blocks.
    auto psi = CompositeState(Layout({{"xi", 2}, {"eta", 2}}), vec({0.6, 0, 0, 0.8}), true);
    const std::string keep[] = {"xi"};
    auto reduced = partial_trace(DensityOperator::pure(psi), keep);
    Matrix expected = Matrix::Zero(2, 2);
    expected(0, 0) = 0.36;
    expected(1, 1) = 0.64;
    CHECK(max_abs_diff(reduced.matrix(), expected) < 1e-15);
  }

  TEST_CASE("unknown subsystem") {
    const std::string keep[] = {"C"};
    CHECK_THROWS_AS(partial_trace(DensityOperator::pure(bell()), keep), UnknownSubsystem);
    CHECK_THROWS_AS(partial_trace(DensityOperator::pure(bell()), std::span<const std::string>{}), InvalidState);
  }

  TEST_CASE("keeps a middle subsystem of three") {
    std::mt19937_64 rng(5);
    auto ra = random_density(rng, Layout({{"a", 2}}));
    auto rb = random_density(rng, Layout({{"b", 3}}));
    auto rc = random_density(rng, Layout({{"c", 2}}));
    const std::string keep[] = {"b"};
    auto reduced = partial_trace(tensor(tensor(ra, rb), rc), keep);
    CHECK(max_abs_diff(reduced.matrix(), rb.matrix()) < 1e-14);
  }

  TEST_CASE("trace, Hermiticity and positivity preserved on 200 random operators") {
    std::mt19937_64 rng(2024);
    const Layout layouts[] = {Layout({{"a", 2}, {"b", 2}}), Layout({{"a", 2}, {"b", 3}, {"c", 2}}),
                              Layout({{"a", 3}, {"b", 4}})};
    for (int trial = 0; trial < 200; ++trial) {
      const Layout& l = layouts[trial % 3];
      auto rho = random_density(rng, l, 1 + trial % 4);
      const std::string keep[] = {l[static_cast<std::size_t>(trial) % l.rank()].name};
      // Construction re-validates all three invariants at 1e-10.
      auto reduced = partial_trace(rho, keep);
      CHECK(std::abs(reduced.trace() - Complex(1.0)) < 1e-10);
      CHECK(reduced.hermiticity_defect() < 1e-10);
      CHECK(reduced.min_eigenvalue() >= -1e-10);
    }
  }
}

TEST_SUITE("project") {
  TEST_CASE("Bell state onto |0> of the second factor") {
    auto out = project(bell(), "B", vec({1, 0}));
    CHECK(out.layout().rank() == 1);
    CHECK(out.layout()[0].name == "A");
    CHECK(max_abs_diff(out.amplitudes(), vec({inv_sqrt2, 0})) < 1e-16);
    CHECK(out.squared_norm() == doctest::Approx(0.5).epsilon(1e-15));
  }

  TEST_CASE("product state onto its own apparatus factor") {
    auto sys = CompositeState::on("S", vec({0.6, Complex(0, 0.8)}));
    auto app = CompositeState::on("M", vec({0, 1, 0}));
    auto out = project(tensor(sys, app), "M", app.amplitudes());
    CHECK(max_abs_diff(out.amplitudes(), sys.amplitudes()) < 1e-16);
  }

  TEST_CASE("a=(0.6, 0.8i) onto eta_2") {
    auto psi = CompositeState(Layout({{"xi", 2}, {"eta", 2}}), vec({0.6, 0, 0, Complex(0, 0.8)}), true);
    auto out = project(psi, "eta", vec({0, 1}));
    CHECK(max_abs_diff(out.amplitudes(), vec({0, Complex(0, 0.8)})) < 1e-16);
    CHECK(out.squared_norm() == doctest::Approx(0.64).epsilon(1e-15));
  }

  TEST_CASE("dimension mismatch") { CHECK_THROWS_AS(project(bell(), "B", vec({1, 0, 0})), DimensionMismatch); }

  TEST_CASE("outcome weights over a basis sum to the squared norm") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
      Layout l({{"a", 2}, {"b", 3}, {"c", 2}});
      CompositeState psi(l, wwsim::testing::random_amplitudes(rng, l.size()));
      const std::string name = l[static_cast<std::size_t>(trial) % 3].name;
      const auto dim = static_cast<Eigen::Index>(l[l.axis_of(name)].dimension);
      // A random orthonormal basis via QR.
      Matrix q = Eigen::HouseholderQR<Matrix>(Matrix::Random(dim, dim)).householderQ();
      double total = 0.0;
      for (Eigen::Index k = 0; k < dim; ++k) total += project(psi, name, q.col(k)).squared_norm();
      CHECK(std::abs(total - psi.squared_norm()) < 1e-10);
    }
  }
}

TEST_SUITE("scalars") {
  TEST_CASE("inner product and normalize") {
    auto a = CompositeState::on("A", vec({3, Complex(0, 4)}));
    CHECK(inner_product(a, a) == Complex(25.0));
    auto n = normalize(a);
    CHECK(n.original_norm == doctest::Approx(5.0));
    CHECK(n.state.normalized());
    CHECK(n.state.norm() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(normalize(CompositeState::on("A", vec({1e-14, 0}))), ZeroNorm);
    CHECK_THROWS_AS(inner_product(a, CompositeState::on("B", vec({1, 0}))), DimensionMismatch);
  }

  TEST_CASE("purity") {
    CHECK(purity(DensityOperator::pure(bell())) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(purity(DensityOperator(Layout({{"q", 2}}), 0.5 * Matrix::Identity(2, 2))) == doctest::Approx(0.5));
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 0.36;
    d(1, 1) = 0.64;
    // 0.36^2 + 0.64^2
    CHECK(purity(DensityOperator(Layout({{"q", 2}}), d)) == doctest::Approx(0.5392).epsilon(1e-15));
  }

  TEST_CASE("purity of a reduced state detects entanglement across the cut") {
    std::mt19937_64 rng(17);
    const std::string keep[] = {"A"};
    for (int trial = 0; trial < 30; ++trial) {
      auto product = tensor(CompositeState::on("A", random_unit(rng, 3)), CompositeState::on("B", random_unit(rng, 2)));
      CHECK(std::abs(purity(partial_trace(DensityOperator::pure(product), keep)) - 1.0) < 1e-10);

      // Bell-type: cos(th)|00> + sin(th)|11>, th away from 0 and pi/2.
      const double th = 0.2 + 1.1 * std::uniform_real_distribution<double>(0, 1)(rng);
      CompositeState entangled(Layout({{"A", 2}, {"B", 2}}), vec({std::cos(th), 0, 0, std::sin(th)}), true);
      const double p = purity(partial_trace(DensityOperator::pure(entangled), keep));
      CHECK(p <= 1.0 + 1e-10);
      CHECK(p < 1.0 - 1e-3);
    }
  }

  TEST_CASE("density operator invariants are enforced") {
    Matrix bad = Matrix::Identity(2, 2);
    CHECK_THROWS_AS(DensityOperator(Layout({{"q", 2}}), bad), InvalidState);  // trace 2
    Matrix neg = Matrix::Zero(2, 2);
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    CHECK_THROWS_AS(DensityOperator(Layout({{"q", 2}}), neg), InvalidState);
    Matrix nonherm = 0.5 * Matrix::Identity(2, 2);
    nonherm(0, 1) = 0.1;
    CHECK_THROWS_AS(DensityOperator(Layout({{"q", 2}}), nonherm), InvalidState);
    CHECK_THROWS_AS(CompositeState(Layout({{"q", 2}}), vec({1, 1}), true), InvalidState);
    CHECK_THROWS_AS(CompositeState(Layout({{"q", 2}}), vec({1})), DimensionMismatch);
  }
}
