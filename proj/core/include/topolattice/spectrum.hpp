#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "topolattice/lattice.hpp"

namespace topolattice {

enum class ModeClass { bulk, edge };
enum class PtTag { unbroken, broken_low_loss, broken_high_loss };

const char* to_string(ModeClass c);
const char* to_string(PtTag t);

// One eigenpair: value stored as re_ghz - i*loss_mhz, amplitudes normalized
// to unit Euclidean norm.
struct EigenMode {
  int m = 0;  // 1-based index after sorting by Re ascending (Im breaks ties)
  double re_ghz = 0.0;
  double loss_mhz = 0.0;
  Eigen::VectorXcd amplitudes;
  ModeClass cls = ModeClass::bulk;
  PtTag pt_tag = PtTag::unbroken;
  bool degenerate = false;  // eigenvalue within 1e-6*(v+w) of a neighbor

  Complex value_mhz() const { return {re_ghz * 1e3, -loss_mhz}; }
};

struct Spectrum {
  std::vector<EigenMode> modes;
  std::optional<LatticeSpec> spec;  // absent when built from a raw matrix
  std::vector<std::string> warnings;

  // Per mode: {m, re_ghz, loss_mhz, class, pt_tag, pdos:[...]}.
  std::string to_json() const;
  // Header: m,re_ghz,loss_mhz,class,pt_tag,s1..s{2N}
  std::string to_csv() const;
};

// Dense general eigensolve; every returned pair satisfies
// ||H phi - lambda phi|| <= 1e-8 * ||H||_F, else it throws.
Spectrum eigendecompose(const ComplexMatrix& h);

// build_chain_hamiltonian + eigendecompose + classify_modes.
Spectrum spectrum_of(const LatticeSpec& spec);

// Per-site weights |phi_{m,s}|^2; sums to 1 within 1e-12.
Eigen::VectorXd pdos(const EigenMode& mode);

// Fills class (mid-gap criterion |Re-omega0| < |w-v|/2), pt_tag (loss vs
// gamma_bar with 0.5 MHz tolerance) and the degeneracy flags. Requires
// spectrum.spec; warns when v < w but the edge-mode count is not 2.
Spectrum classify_modes(Spectrum spectrum);

// (beta_real, beta_imag) = ([Re-omega0]/(v+w), [|Im|-gamma_bar]/(v+w)).
std::vector<std::pair<double, double>> normalized_eigenvalues(
    const Spectrum& spectrum);

// Hausdorff distance between {eps_m} and {-conj(eps_m)} with
// eps_m = (value - omega0) + i*gamma_bar, in MHz. Zero certifies
// particle-hole symmetry of the spectrum.
double particle_hole_residual(const Spectrum& spectrum);

}  // namespace topolattice
