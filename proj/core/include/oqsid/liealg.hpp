#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "oqsid/linalg.hpp"

namespace oqsid {

/// Trace-orthonormal Hermitian basis of su(2^q) built from Pauli words.
///
/// Generators are indexed 0..n-1 in code (1..n in files). The identity
/// component F_0 = 1/sqrt(N) is kept apart and never mixed into that range.
struct LieBasis {
  int num_qubits = 0;
  int hilbert_dim = 0;  // N = 2^q
  int n = 0;            // N^2 - 1
  std::vector<CMat> generators;
  std::vector<std::string> labels;  // Pauli words over {I,x,y,z}, qubit 1 first
  CMat identity_component;

  const CMat& operator[](std::size_t j) const { return generators[j]; }
};

/// One stored structure constant; indices are 0-based.
struct TensorEntry {
  int j = 0;
  int k = 0;
  int l = 0;
  double value = 0.0;
};

/// Sparse antisymmetric (f) and symmetric (g) structure constants.
///
/// Each list holds all nonzero (j, k, l) entries, both orderings of (j, k).
/// The per-pair index gives the entries with a given (j, k) in O(1).
class StructureTensors {
 public:
  StructureTensors() = default;
  StructureTensors(int n, std::vector<TensorEntry> f, std::vector<TensorEntry> g);

  int n() const { return n_; }
  const std::vector<TensorEntry>& f_entries() const { return f_; }
  const std::vector<TensorEntry>& g_entries() const { return g_; }

  /// Entries (l, value) with fixed leading pair (j, k).
  struct Slot {
    int l;
    double value;
  };
  const std::vector<Slot>& f_pair(int j, int k) const { return f_by_pair_[pair(j, k)]; }
  const std::vector<Slot>& g_pair(int j, int k) const { return g_by_pair_[pair(j, k)]; }

  double f(int j, int k, int l) const;
  double g(int j, int k, int l) const;
  /// z_jkl = f_jkl + i g_jkl
  cplx z(int j, int k, int l) const { return {f(j, k, l), g(j, k, l)}; }

 private:
  std::size_t pair(int j, int k) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(k);
  }

  int n_ = 0;
  std::vector<TensorEntry> f_;
  std::vector<TensorEntry> g_;
  std::vector<std::vector<Slot>> f_by_pair_;
  std::vector<std::vector<Slot>> g_by_pair_;
};

struct SparsityReport {
  int max_f_count = 0;
  int max_g_count = 0;
  /// Pairs (j, k) whose count exceeds one, up to a handful, for diagnostics.
  std::vector<std::pair<int, int>> f_offenders;
  std::vector<std::pair<int, int>> g_offenders;
  bool holds() const { return max_f_count <= 1 && max_g_count <= 1; }
};

inline constexpr int kMaxQubits = 4;
inline constexpr double kTensorCutoff = 1e-12;

/// Generalized Pauli basis: words over {I,x,y,z}^q without the all-identity
/// word, lexicographic with I < x < y < z, each scaled by 1/sqrt(N).
LieBasis build_basis(int num_qubits);

/// The three raw Pauli matrices (no 1/sqrt(2) scaling). Only for checking
/// the textbook values f_jkl = 2 eps_jkl, g = 0.
LieBasis raw_pauli_basis();

/// Expansion coefficients [F_j, F_k] = i sum_l f_jkl F_l and the traceless part of
/// {F_j, F_k} = sum_l g_jkl F_l; for the normalized basis f_jkl = -i Tr([F_j, F_k] F_l)
/// and g_jkl = Tr({F_j, F_k} F_l).
///
/// Throws if an extracted constant carries an imaginary part >= 1e-10.
/// Entries of magnitude <= 1e-12 are dropped.
StructureTensors structure_constants(const LieBasis& basis);

SparsityReport verify_sparsity(const StructureTensors& tensors);

/// Pauli word for generator index j (0-based).
const std::string& generator_label(const LieBasis& basis, int j);

/// Index of a Pauli word such as "xz"; -1 when absent.
int generator_index(const LieBasis& basis, const std::string& word);

}  // namespace oqsid
