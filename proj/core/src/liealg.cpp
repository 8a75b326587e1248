#include "oqsid/liealg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <tuple>

namespace oqsid {

namespace {

std::array<CMat, 4> single_qubit_paulis() {
  using namespace std::complex_literals;
  CMat id = CMat::Identity(2, 2);
  CMat x(2, 2), y(2, 2), z(2, 2);
  x << 0.0, 1.0, 1.0, 0.0;
  y << 0.0, -1.0i, 1.0i, 0.0;
  z << 1.0, 0.0, 0.0, -1.0;
  return {id, x, y, z};
}

constexpr std::array<char, 4> kLetters = {'I', 'x', 'y', 'z'};

// Trace of a*b without forming the product.
cplx trace_product(const CMat& a, const CMat& b) {
  return (a.array() * b.transpose().array()).sum();
}

}  // namespace

StructureTensors::StructureTensors(int n, std::vector<TensorEntry> f, std::vector<TensorEntry> g)
    : n_(n), f_(std::move(f)), g_(std::move(g)) {
  const auto pairs = static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
  f_by_pair_.assign(pairs, {});
  g_by_pair_.assign(pairs, {});
  for (const auto& e : f_) f_by_pair_[pair(e.j, e.k)].push_back({e.l, e.value});
  for (const auto& e : g_) g_by_pair_[pair(e.j, e.k)].push_back({e.l, e.value});
}

double StructureTensors::f(int j, int k, int l) const {
  for (const auto& s : f_pair(j, k))
    if (s.l == l) return s.value;
  return 0.0;
}

double StructureTensors::g(int j, int k, int l) const {
  for (const auto& s : g_pair(j, k))
    if (s.l == l) return s.value;
  return 0.0;
}

LieBasis build_basis(int num_qubits) {
  if (num_qubits < 1 || num_qubits > kMaxQubits)
    throw Error("build_basis: num_qubits must be in [1, " + std::to_string(kMaxQubits) + "], got " +
                std::to_string(num_qubits));

  const auto paulis = single_qubit_paulis();
  LieBasis basis;
  basis.num_qubits = num_qubits;
  basis.hilbert_dim = 1 << num_qubits;
  basis.n = basis.hilbert_dim * basis.hilbert_dim - 1;
  const double scale = 1.0 / std::sqrt(static_cast<double>(basis.hilbert_dim));
  basis.identity_component = CMat::Identity(basis.hilbert_dim, basis.hilbert_dim) * scale;

  const int words = 1 << (2 * num_qubits);
  basis.generators.reserve(static_cast<std::size_t>(words - 1));
  basis.labels.reserve(static_cast<std::size_t>(words - 1));
  // Word w, written in base 4 with the first qubit as the most significant
  // digit, enumerates {I,x,y,z}^q lexicographically.
  for (int w = 1; w < words; ++w) {
    CMat op = CMat::Identity(1, 1);
    std::string label;
    for (int q = num_qubits - 1; q >= 0; --q) {
      const int digit = (w >> (2 * q)) & 3;
      op = linalg::kron(op, paulis[static_cast<std::size_t>(digit)]);
      label.push_back(kLetters[static_cast<std::size_t>(digit)]);
    }
    basis.generators.push_back(op * scale);
    basis.labels.push_back(std::move(label));
  }
  return basis;
}

LieBasis raw_pauli_basis() {
  const auto paulis = single_qubit_paulis();
  LieBasis basis;
  basis.num_qubits = 1;
  basis.hilbert_dim = 2;
  basis.n = 3;
  basis.identity_component = CMat::Identity(2, 2);
  for (int j = 1; j <= 3; ++j) {
    basis.generators.push_back(paulis[static_cast<std::size_t>(j)]);
    basis.labels.emplace_back(1, kLetters[static_cast<std::size_t>(j)]);
  }
  return basis;
}

StructureTensors structure_constants(const LieBasis& basis) {
  const int n = basis.n;
  std::vector<TensorEntry> f;
  std::vector<TensorEntry> g;
  constexpr double kImagLimit = 1e-10;
  // Expansion coefficients: divide by Tr(F_l F_l), which is 1 for the normalized basis.
  std::vector<double> gram(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) gram[static_cast<std::size_t>(l)] = trace_product(basis[l], basis[l]).real();

  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      const CMat jk = basis[j] * basis[k];
      const CMat kj = basis[k] * basis[j];
      const CMat comm = jk - kj;
      const CMat anti = jk + kj;
      for (int l = 0; l < n; ++l) {
        if (k != j) {
          const cplx fv = cplx(0.0, -1.0) * trace_product(comm, basis[l]) / gram[static_cast<std::size_t>(l)];
          if (std::abs(fv.imag()) >= kImagLimit)
            throw Error("structure_constants: f has imaginary residue at (" + std::to_string(j + 1) +
                        "," + std::to_string(k + 1) + "," + std::to_string(l + 1) + ")");
          if (std::abs(fv.real()) > kTensorCutoff) {
            f.push_back({j, k, l, fv.real()});
            f.push_back({k, j, l, -fv.real()});
          }
        }
        const cplx gv = trace_product(anti, basis[l]) / gram[static_cast<std::size_t>(l)];
        if (std::abs(gv.imag()) >= kImagLimit)
          throw Error("structure_constants: g has imaginary residue at (" + std::to_string(j + 1) +
                      "," + std::to_string(k + 1) + "," + std::to_string(l + 1) + ")");
        if (std::abs(gv.real()) > kTensorCutoff) {
          g.push_back({j, k, l, gv.real()});
          if (k != j) g.push_back({k, j, l, gv.real()});
        }
      }
    }
  }
  auto order = [](const TensorEntry& a, const TensorEntry& b) {
    return std::tie(a.j, a.k, a.l) < std::tie(b.j, b.k, b.l);
  };
  std::sort(f.begin(), f.end(), order);
  std::sort(g.begin(), g.end(), order);
  return StructureTensors(n, std::move(f), std::move(g));
}

SparsityReport verify_sparsity(const StructureTensors& tensors) {
  SparsityReport report;
  constexpr std::size_t kMaxOffenders = 8;
  const int n = tensors.n();
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      const int fc = static_cast<int>(tensors.f_pair(j, k).size());
      const int gc = static_cast<int>(tensors.g_pair(j, k).size());
      report.max_f_count = std::max(report.max_f_count, fc);
      report.max_g_count = std::max(report.max_g_count, gc);
      if (fc > 1 && report.f_offenders.size() < kMaxOffenders) report.f_offenders.emplace_back(j, k);
      if (gc > 1 && report.g_offenders.size() < kMaxOffenders) report.g_offenders.emplace_back(j, k);
    }
  }
  return report;
}

const std::string& generator_label(const LieBasis& basis, int j) {
  return basis.labels.at(static_cast<std::size_t>(j));
}

int generator_index(const LieBasis& basis, const std::string& word) {
  const auto it = std::find(basis.labels.begin(), basis.labels.end(), word);
  return it == basis.labels.end() ? -1 : static_cast<int>(it - basis.labels.begin());
}

}  // namespace oqsid
