#pragma once

#include <iosfwd>

#include "oqsid/gksl.hpp"
#include "oqsid/identify.hpp"
#include "oqsid/liealg.hpp"
#include "oqsid/paramrec.hpp"

namespace oqsid::demo {

/// Two coupled qubits with dephasing and amplitude channels:
/// H = w1/2 zI + w2/2 Iz + delta (xx + yy), rates g^z_k, g^-_k, g^+_k.
struct TwoQubitExample {
  double omega1 = 1.0;
  double omega2 = 2.0;
  double delta = 0.5;
  double g1z = 0.1;
  double g2z = 0.2;
  double g1m = 0.05;
  double g2m = 0.07;
  double g1p = 0.03;
  double g2p = 0.04;
};

/// theta from the Hamiltonian; gamma in the symmetric form
///   diag = (2 g1-, 2 g2+, (g1z + g2z)/8, (g1+ + g2-)/2, (g1z + g2z)/8, (g1+ + g2-)/2, 0, ...)
///   gamma_35 = gamma_53 = (g1z - g2z)/8, gamma_46 = gamma_64 = -(g1+ - g2-)/2
/// placed on generators 1..6.
GkslParams example_params(const LieBasis& basis, const TwoQubitExample& ex);

/// Inverse of example_params on recovered (theta, gamma).
TwoQubitExample example_from_params(const LieBasis& basis, const Vec& theta, const Mat& gamma);

struct DemoOptions {
  double period = 1.0;
  int interior_points = 1;
  int frames = 2;
  int steps_per_min_increment = 400;
  int threads = 0;
};

struct DemoResult {
  TwoQubitExample truth;
  TwoQubitExample recovered;
  IdentifiabilityReport report;
  RecoveredParams params;
  double max_parameter_error = 0.0;
  double max_A_error = 0.0;
};

/// basis -> system -> simulated multirate record -> identifiability check ->
/// discrete fit -> continuous reconstruction -> symmetric parameter recovery.
DemoResult run_two_qubit(const TwoQubitExample& ex = {}, const DemoOptions& options = {});

void print_summary(std::ostream& out, const DemoResult& r);

}  // namespace oqsid::demo
