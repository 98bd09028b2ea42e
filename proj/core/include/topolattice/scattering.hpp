#pragma once

#include <string>
#include <vector>

#include "topolattice/lattice.hpp"
#include "topolattice/magnon.hpp"

namespace topolattice {

// Two measurement ports loading single chain sites. port2_site = 0 is a
// placeholder for "last site", resolved against the chain length in use.
struct PortConfig {
  int port1_site = 1;
  int port2_site = 0;
  double kappa1_mhz = 0.0;
  double kappa2_mhz = 0.0;

  // Copy with port2_site = 0 replaced by n_sites.
  PortConfig resolved(int n_sites) const;

  // Throws std::invalid_argument listing every violated invariant
  // (distinct in-range sites, nonnegative couplings).
  void validate(int n_sites) const;

  std::string to_json() const;
  static PortConfig from_json(const std::string& text);
};

// H with -i*kappa added on the two port diagonals.
ComplexMatrix effective_hamiltonian(const ComplexMatrix& h, const PortConfig& ports);

// Temporal coupled-mode S-matrix at the probe frequency:
//   S_ab = delta_ab - 2i*sqrt(kappa_a kappa_b) * G(p_a, p_b),
//   G = (omega*I - H_eff)^(-1).
// Column = input port, row = output port. The raw-matrix overload checks the
// port sites for range only, so both ports may load one site (single-mode
// reference case); the LatticeSpec overload enforces the full PortConfig
// invariants.
Eigen::Matrix2cd s_matrix(const ComplexMatrix& h, const PortConfig& ports,
                          double omega_ghz);
Eigen::Matrix2cd s_matrix(const LatticeSpec& spec, const PortConfig& ports,
                          double omega_ghz);

// A_p = 1 - |S_pp|^2 - |S_qp|^2 for input_port p in {1, 2}.
double absorptivity(const Eigen::Matrix2cd& s, int input_port);
double absorptivity(const LatticeSpec& spec, const PortConfig& ports,
                    double omega_ghz, int input_port);

// |S21|^2 and both absorptivities over a (current, probe frequency) grid,
// with the magnon retuned per current point.
struct TransmissionMap {
  std::vector<double> currents_a;
  std::vector<double> omegas_ghz;
  LatticeSpec lattice;
  MagnonSpec magnon;
  PortConfig ports;
  // rows = currents, cols = probe frequencies
  Eigen::MatrixXd s21_sq;
  Eigen::MatrixXd a1;
  Eigen::MatrixXd a2;

  // Long form, row-major over (current, omega).
  // Header: current_a,omega_ghz,s21_sq,a1,a2
  std::string to_csv() const;

  // Grid metadata + parameter sections; serialize -> parse -> serialize is
  // byte-identical.
  std::string header_json() const;
  static TransmissionMap from_header_json(const std::string& text);
};

TransmissionMap transmission_map(const LatticeSpec& spec, const MagnonSpec& magnon,
                                 const PortConfig& ports,
                                 const std::vector<double>& currents_a,
                                 const std::vector<double>& omegas_ghz);

}  // namespace topolattice
