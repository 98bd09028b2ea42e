#pragma once

#include <string>
#include <utility>
#include <vector>

#include "topolattice/lattice.hpp"
#include "topolattice/spectrum.hpp"

namespace topolattice {

// Magnon mode attached to a single chain site. The bias-field tuning enters
// through an affine current map omega_n(I) = c0 + c1*I; a fixed detuning is
// the c1 = 0 special case.
struct MagnonSpec {
  int site = 1;             // 1-based chain site the sphere sits on
  double g0_mhz = 0.0;      // bare site coupling
  double gamma_n_mhz = 0.0; // magnon total loss
  double c0_ghz = 0.0;
  double c1_ghz_per_a = 0.0;

  double omega_n_ghz(double current_a) const {
    return c0_ghz + c1_ghz_per_a * current_a;
  }

  // Throws std::invalid_argument listing every violated invariant.
  void validate(int n_sites) const;

  std::string to_json() const;
  static MagnonSpec from_json(const std::string& text);
};

// Microscopic inputs behind the collective coupling; SI units throughout
// (chi in rad/(s*T), omega_r in rad/s, mode_volume in m^3).
struct PhysicalCouplingParams {
  double eta = 1.0;      // field-overlap factor, 0 < eta <= 1
  double chi = 0.0;      // gyromagnetic ratio
  double n_spins = 0.0;  // total number of spins in the sphere
  double spin_s = 2.5;   // spin quantum number per site
  double omega_r = 0.0;  // resonance angular frequency
  double mode_volume = 0.0;

  void validate() const;
};

// g0 = calibration * eta * chi * sqrt(n * S * hbar * omega_r / (2 V)).
// The calibration constant absorbs the unspecified proportionality factor
// and carries the conversion to MHz.
double g_from_physical(const PhysicalCouplingParams& params, double calibration);

// (n+1)x(n+1) block matrix: chain unchanged, magnon diagonal
// omega_n - i*gamma_n appended last, coupling g0 to the chosen site only.
ComplexMatrix build_coupled_hamiltonian(const ComplexMatrix& h,
                                        const MagnonSpec& magnon,
                                        double omega_n_ghz);

// Hybridized pair of one magnon and one photonic mode (inputs and outputs in
// absolute complex MHz, Im = -loss):
//   omega_pm = (on + om)/2 +- sqrt((on - om)^2 + 4 g^2)/2
// Principal square root, so Re(plus) >= Re(minus).
std::pair<Complex, Complex> two_mode_hybrid(Complex omega_n_mhz,
                                            Complex omega_m_mhz, double g_mhz);

// g_{m,s} = g0 * |phi_{m,s}|; m and s are 1-based.
double effective_coupling(const Spectrum& spectrum, int m, int s, double g0_mhz);

// PDOS-weighted average of the two edge-mode losses at site s. Requires the
// spectrum to hold exactly two edge-classified modes.
double edge_linewidth(const Spectrum& spectrum, int s);

struct SweepResult {
  std::vector<double> currents_a;
  // branches[b][t]: eigenvalue of branch b at currents_a[t], absolute MHz.
  // Branch labels follow the eigenvector continuously across the sweep,
  // starting from the sorted order at the first point.
  std::vector<std::vector<Complex>> branches;
  std::vector<std::string> warnings;

  // Header: current_a,branch,re_ghz,loss_mhz
  std::string to_csv() const;
};

// Diagonalizes the coupled matrix on every current point and tracks branches
// by maximal eigenvector overlap between neighbors; ambiguous assignments
// (overlap below 1/sqrt(2)) are recorded in warnings, not silently resolved.
SweepResult anticrossing_sweep(const LatticeSpec& spec, const MagnonSpec& magnon,
                               const std::vector<double>& currents_a);

}  // namespace topolattice
