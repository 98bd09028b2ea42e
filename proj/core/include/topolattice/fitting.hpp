#pragma once

#include <array>
#include <string>
#include <vector>

#include "topolattice/magnon.hpp"
#include "topolattice/scattering.hpp"

namespace topolattice {

struct Peak {
  double center_ghz = 0.0;
  double fwhm_mhz = 0.0;  // NaN when a half-height crossing is missing
  double height = 0.0;
};

// Local maxima of a uniformly sampled trace (>= 16 points) with topographic
// prominence at least prominence_frac of the global maximum. Centers and
// heights come from a three-point parabolic fit on log amplitude; widths from
// linear interpolation at half height. Returned sorted by center.
std::vector<Peak> find_peaks(const std::vector<double>& omegas_ghz,
                             const std::vector<double>& values,
                             double prominence_frac = 0.05);

struct BranchPoint {
  double current_a = 0.0;
  double omega_ghz = 0.0;
};

struct FitResult {
  double g_mhz = 0.0;
  double omega_m_ghz = 0.0;
  double loss_m_mhz = 0.0;  // total mode loss (intrinsic + port)
  double gamma_n_mhz = 0.0;
  double residual = 0.0;  // RMS objective, MHz
  std::array<double, 4> covariance_diag{};  // order: g, omega_m, loss_m, gamma_n
  bool converged = false;
  std::vector<std::string> warnings;

  // Keys: g_mhz, omega_m_ghz, loss_m_mhz, gamma_n_mhz, residual, converged.
  std::string to_json() const;
};

// Damped least squares against the real parts of the two-mode hybrid
// branches, with omega_n(I) taken from the magnon's current map. The two
// traces guide initialization (g from half the minimum branch gap, omega_m
// from the branch asymptotes); the objective itself matches every sample to
// the nearer model branch, so it is symmetric under label exchange. Iteration
// cap 200; convergence at relative step < 1e-10.
FitResult fit_level_repulsion(const std::vector<BranchPoint>& branch_a,
                              const std::vector<BranchPoint>& branch_b,
                              const MagnonSpec& magnon,
                              const FitResult* init = nullptr);

enum class Branch { lower, upper };

// HWHM (MHz) of the lower- or upper-frequency transmission peak in the map's
// frequency cut nearest to the given current. The two tallest peaks define
// the branches; a single resolvable peak serves both labels.
double extract_linewidth(const TransmissionMap& map, Branch branch,
                         double at_current_a);

}  // namespace topolattice
