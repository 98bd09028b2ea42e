#pragma once

#include <string>
#include <vector>

#include "topolattice/lattice.hpp"

namespace topolattice {

enum class EpKind { edge, bulk };

const char* to_string(EpKind k);

// A detected eigenvalue coalescence along a delta-gamma sweep.
struct EpReport {
  double delta_gamma_c_mhz = 0.0;
  double normalized = 0.0;  // delta_gamma_c / [2(v+w)]
  int mode_i = 0;           // 1-based sorted indices of the coalescing pair
  int mode_j = 0;
  EpKind kind = EpKind::edge;
};

// Winding of h(k) = v + w*exp(-ik) over the Brillouin zone, oriented so the
// topological dimerization v < w gives +1. Throws when the raw value is not
// an integer within 0.01 (|v| = |w| criticality or insufficient grid).
int winding_hermitian(const LatticeSpec& spec, int n_k = 256);

// Generalized winding: half the phase winding of
// q2(k) = h(k)*conj(h(-k)) - (delta_gamma/2)^2 on the same oriented loop.
// Domain: delta_gamma/2 < |w - v| (PT-unbroken bulk), else std::domain_error.
// Reduces to winding_hermitian at delta_gamma = 0.
int winding_generalized(const LatticeSpec& spec, int n_k = 256);

// Loss contrast closing the bulk real gap: exactly 2|w - v| (k = pi minimum).
double bulk_sptb_threshold(const LatticeSpec& spec);

// Bisection (relative accuracy 1e-6) for the loss contrast where the mid-gap
// pair trades its real-part splitting for a loss splitting. gamma_bar is held
// fixed along the sweep. Requires v < w and an identifiable mid-gap pair.
EpReport edge_sptb_threshold(const LatticeSpec& spec);

struct ThresholdPoint {
  int n_cells = 0;
  double delta_gamma_c_mhz = 0.0;
};

struct ThresholdScaling {
  std::vector<ThresholdPoint> points;
  // Least-squares fit of log(delta_gamma_c) on N; NaN when < 2 points.
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;

  // Header: n_cells,delta_gamma_c_mhz,r_squared
  std::string to_csv() const;
};

// edge_sptb_threshold per chain length; failures rethrown with the offending N.
ThresholdScaling threshold_vs_length(const LatticeSpec& spec,
                                     const std::vector<int>& n_values);

// Sweeps the loss contrast over the given ascending grid, locates local minima
// of the all-pairs eigenvalue gap, refines each bracket by golden-section
// search, and keeps candidates whose eigenvectors align to |<phi_i,phi_j>|
// >= 0.99. Kind is decided by the pair's boundary-site weight.
std::vector<EpReport> ep_scan(const LatticeSpec& spec,
                              const std::vector<double>& delta_gamma_grid_mhz);

// Header: delta_gamma_mhz,normalized,kind,mode_i,mode_j
std::string ep_csv(const std::vector<EpReport>& reports);

}  // namespace topolattice
