#pragma once

#include <complex>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace topolattice {

using Complex = std::complex<double>;

// Dimerized photonic chain with alternating on-site losses. Sites are
// 1-based, s = 1..2N; odd sites carry gamma_a, even sites gamma_b.
// omega0 is in GHz; every rate and coupling is in MHz.
struct LatticeSpec {
  int n_cells = 1;
  double omega0_ghz = 0.0;
  double gamma_a_mhz = 0.0;
  double gamma_b_mhz = 0.0;
  double v_mhz = 0.0;             // intracell hopping
  double w_mhz = 0.0;             // intercell hopping
  double hopping_imag_mhz = 0.0;  // shared dissipative hopping correction

  int sites() const { return 2 * n_cells; }
  double omega0_mhz() const { return omega0_ghz * 1e3; }
  double delta_gamma_mhz() const { return gamma_b_mhz - gamma_a_mhz; }
  double gamma_bar_mhz() const { return 0.5 * (gamma_a_mhz + gamma_b_mhz); }
  bool hermitian() const {
    return gamma_a_mhz == gamma_b_mhz && hopping_imag_mhz == 0.0;
  }

  // Throws std::invalid_argument listing every violated invariant.
  void validate() const;

  std::string to_json() const;
  static LatticeSpec from_json(const std::string& text);
};

// Square complex matrix in MHz relative to ref_mhz (0 means absolute MHz).
// Chain Hamiltonians are 2N x 2N; magnon augmentation adds one row/column.
struct ComplexMatrix {
  Eigen::MatrixXcd values;
  double ref_mhz = 0.0;
};

// Real-space chain Hamiltonian, absolute MHz entries:
//   H[s][s]   = omega0 - i*gamma_(A|B)     (odd|even s)
//   H[s][s+1] = H[s+1][s] = v - i*Gamma    (odd s)  or  w - i*Gamma (even s)
ComplexMatrix build_chain_hamiltonian(const LatticeSpec& spec);

// 2x2 Bloch matrix [[omega0 - i*gamma_a, h(k)], [h(-k), omega0 - i*gamma_b]]
// with h(k) = (v - i*Gamma) + (w - i*Gamma)*exp(-ik). The lower-left entry
// uses the same complex hopping coefficients (no conjugation): that is the
// Bloch reduction of the complex-symmetric real-space matrix and reproduces
// the Hermitian limit exactly.
ComplexMatrix bloch_hamiltonian(const LatticeSpec& spec, double k);

// Off-diagonal Bloch component h(k) in MHz.
Complex bloch_offdiagonal(const LatticeSpec& spec, double k);

// Analytic bands omega0 - i*gamma_bar +- sqrt(h(k) h(-k) - (dgamma/2)^2),
// principal square-root branch; returned as (plus, minus) in absolute MHz.
std::pair<Complex, Complex> bulk_bands(const LatticeSpec& spec, double k);

// Copy of spec with the requested loss contrast. The mean loss is kept at
// spec's gamma_bar when possible and raised to delta_gamma/2 otherwise, so
// gamma_a never goes negative; every exported observable is invariant under
// that uniform shift.
LatticeSpec with_delta_gamma(const LatticeSpec& spec, double delta_gamma_mhz);

}  // namespace topolattice
