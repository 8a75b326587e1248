#include <doctest.h>

#include <cmath>

#include "oqsid/liealg.hpp"
#include "support/oracles.hpp"

using namespace oqsid;

TEST_CASE("basis sizes and normalization") {
  for (int q : {1, 2, 3}) {
    const LieBasis b = build_basis(q);
    CHECK(b.hilbert_dim == (1 << q));
    CHECK(b.n == b.hilbert_dim * b.hilbert_dim - 1);
    CHECK(static_cast<int>(b.generators.size()) == b.n);
    double worst = 0.0;
    for (int m = 0; m < b.n; ++m) {
      CHECK((b[m] - b[m].adjoint()).cwiseAbs().maxCoeff() < 1e-15);
      CHECK(std::abs(b[m].trace()) < 1e-15);
      for (int k = 0; k < b.n; ++k) {
        const double want = m == k ? 1.0 : 0.0;
        worst = std::max(worst, std::abs((b[m] * b[k]).trace() - cplx(want, 0.0)));
      }
      worst = std::max(worst, std::abs((b[m] * b.identity_component).trace()));
    }
    CHECK(worst < 1e-12);
    CHECK(std::abs((b.identity_component * b.identity_component).trace() - 1.0) < 1e-12);
  }
}

TEST_CASE("one-qubit generators are the scaled Paulis") {
  const LieBasis b = build_basis(1);
  const double s = 1.0 / std::sqrt(2.0);
  CMat x(2, 2), y(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  y << 0, cplx(0, -1), cplx(0, 1), 0;
  z << 1, 0, 0, -1;
  CHECK((b[0] - s * x).norm() < 1e-15);
  CHECK((b[1] - s * y).norm() < 1e-15);
  CHECK((b[2] - s * z).norm() < 1e-15);
  CHECK(b.labels == std::vector<std::string>{"x", "y", "z"});
}

TEST_CASE("lexicographic word ordering") {
  const LieBasis b = build_basis(2);
  CHECK(b.labels.front() == "Ix");
  CHECK(b.labels.back() == "zz");
  CHECK(generator_index(b, "zI") == 11);
  CHECK(generator_index(b, "Iz") == 2);
  CHECK(generator_index(b, "II") == -1);
  CHECK(generator_label(b, 4) == "xx");
}

TEST_CASE("qubit range is enforced") {
  CHECK_THROWS_AS(build_basis(0), Error);
  CHECK_THROWS_AS(build_basis(kMaxQubits + 1), Error);
}

TEST_CASE("raw Paulis give f = 2 eps and g = 0") {
  const LieBasis raw = raw_pauli_basis();
  const StructureTensors t = structure_constants(raw);
  CHECK(t.g_entries().empty());
  auto eps = [](int j, int k, int l) { return static_cast<double>((j - k) * (k - l) * (l - j)) / 2.0; };
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) CHECK(t.f(j, k, l) == 2.0 * eps(j, k, l));
}

TEST_CASE("normalized one-qubit f_123 equals sqrt 2") {
  const StructureTensors t = structure_constants(build_basis(1));
  CHECK(t.f(0, 1, 2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(t.f(1, 0, 2) == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("sparse tensors agree with dense trace oracle") {
  for (int q : {1, 2}) {
    const LieBasis b = build_basis(q);
    const StructureTensors t = structure_constants(b);
    const auto dense = oracle::dense_structure_constants(b.generators);
    CHECK(dense.max_imag < 1e-12);
    double worst = 0.0;
    for (int j = 0; j < b.n; ++j)
      for (int k = 0; k < b.n; ++k)
        for (int l = 0; l < b.n; ++l) {
          worst = std::max(worst, std::abs(t.f(j, k, l) - dense.F(j, k, l)));
          worst = std::max(worst, std::abs(t.g(j, k, l) - dense.G(j, k, l)));
          CHECK(t.z(j, k, l) == cplx(t.f(j, k, l), t.g(j, k, l)));
        }
    CHECK(worst < 1e-13);
  }
}

TEST_CASE("local generators on different qubits commute") {
  const LieBasis b = build_basis(2);
  const StructureTensors t = structure_constants(b);
  for (const char* a : {"xI", "yI", "zI"})
    for (const char* c : {"Ix", "Iy", "Iz"}) {
      CHECK(t.f_pair(generator_index(b, a), generator_index(b, c)).empty());
    }
}

TEST_CASE("symmetry properties of stored entries") {
  for (int q : {1, 2, 3}) {
    const StructureTensors t = structure_constants(build_basis(q));
    for (const auto& e : t.f_entries()) {
      CHECK(t.f(e.k, e.j, e.l) == -e.value);
      CHECK(t.f(e.k, e.l, e.j) == doctest::Approx(e.value).epsilon(1e-12));
      CHECK(t.f(e.l, e.j, e.k) == doctest::Approx(e.value).epsilon(1e-12));
    }
    for (const auto& e : t.g_entries()) {
      CHECK(t.g(e.k, e.j, e.l) == e.value);
      CHECK(e.j != e.k);
    }
  }
}

TEST_CASE("commutator and anticommutator reconstruction") {
  oracle::Rng rng(11);
  for (int q : {1, 2, 3}) {
    const LieBasis b = build_basis(q);
    const StructureTensors t = structure_constants(b);
    const int N = b.hilbert_dim;
    for (int trial = 0; trial < 20; ++trial) {
      const int j = static_cast<int>(rng.uniform(0, b.n));
      const int k = static_cast<int>(rng.uniform(0, b.n));
      CMat comm = b[j] * b[k] - b[k] * b[j];
      CMat anti = b[j] * b[k] + b[k] * b[j];
      if (j == k) anti -= (2.0 / N) * CMat::Identity(N, N);
      for (const auto& s : t.f_pair(j, k)) comm -= cplx(0.0, s.value) * b[s.l];
      for (const auto& s : t.g_pair(j, k)) anti -= s.value * b[s.l];
      CHECK(comm.operatorNorm() < 1e-12);
      CHECK(anti.operatorNorm() < 1e-12);
    }
  }
}

TEST_CASE("sparsity report") {
  const SparsityReport r1 = verify_sparsity(structure_constants(build_basis(1)));
  CHECK(r1.max_f_count == 1);
  CHECK(r1.max_g_count == 0);
  for (int q : {2, 3}) {
    const SparsityReport r = verify_sparsity(structure_constants(build_basis(q)));
    CHECK(r.max_f_count == 1);
    CHECK(r.max_g_count == 1);
    CHECK(r.holds());
    CHECK(r.f_offenders.empty());
  }
}
