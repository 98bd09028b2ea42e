#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "support.hpp"
#include "topolattice/fitting.hpp"
#include "topolattice/magnon.hpp"
#include "topolattice/scattering.hpp"

using namespace topolattice;
using testsupport::contains;
using testsupport::linspace;
using testsupport::lossy_chain;

namespace {

double lorentzian(double omega_ghz, double center_ghz, double fwhm_mhz,
                  double height) {
  const double half = 0.5 * fwhm_mhz;
  const double detuning = (omega_ghz - center_ghz) * 1e3;
  return height * half * half / (detuning * detuning + half * half);
}

MagnonSpec tuning_magnon(double gamma_n = 16.0) {
  MagnonSpec magnon;
  magnon.site = 1;
  magnon.g0_mhz = 100.0;  // not used by the fit itself
  magnon.gamma_n_mhz = gamma_n;
  magnon.c0_ghz = 3.2;
  magnon.c1_ghz_per_a = 0.42;
  return magnon;
}

struct TrueParams {
  double g_mhz;
  double omega_m_mhz;
  double loss_m_mhz;
  double gamma_n_mhz;
};

// Synthetic anticrossing branches from the hybrid model itself.
void synthesize(const TrueParams& truth, const MagnonSpec& magnon,
                const std::vector<double>& currents, double noise_sigma_mhz,
                std::mt19937& rng, std::vector<BranchPoint>& upper,
                std::vector<BranchPoint>& lower) {
  std::normal_distribution<double> noise(0.0, noise_sigma_mhz);
  upper.clear();
  lower.clear();
  for (double current : currents) {
    const Complex omega_n(magnon.omega_n_ghz(current) * 1e3,
                          -truth.gamma_n_mhz);
    const Complex omega_m(truth.omega_m_mhz, -truth.loss_m_mhz);
    const auto pair = two_mode_hybrid(omega_n, omega_m, truth.g_mhz);
    double up = pair.first.real();
    double down = pair.second.real();
    if (noise_sigma_mhz > 0.0) {
      up += noise(rng);
      down += noise(rng);
    }
    upper.push_back({current, up * 1e-3});
    lower.push_back({current, down * 1e-3});
  }
}

}  // namespace

TEST_CASE("find_peaks recovers an isolated line") {
  const std::vector<double> omegas = linspace(5.3, 5.7, 401);
  std::vector<double> trace(omegas.size());
  for (size_t i = 0; i < omegas.size(); ++i) {
    trace[i] = lorentzian(omegas[i], 5.4821, 30.0, 2.5);
  }
  const auto peaks = find_peaks(omegas, trace);
  REQUIRE(peaks.size() == 1);
  // The parabolic refinement lands well inside one grid step (1 MHz).
  CHECK(std::abs(peaks[0].center_ghz - 5.4821) * 1e3 < 0.05);
  CHECK(peaks[0].fwhm_mhz == doctest::Approx(30.0).epsilon(0.01));
  CHECK(peaks[0].height == doctest::Approx(2.5).epsilon(0.01));
}

TEST_CASE("find_peaks separates and orders two lines") {
  const std::vector<double> omegas = linspace(5.2, 5.8, 601);
  std::vector<double> trace(omegas.size());
  for (size_t i = 0; i < omegas.size(); ++i) {
    trace[i] = lorentzian(omegas[i], 5.62, 25.0, 1.0) +
               lorentzian(omegas[i], 5.38, 40.0, 0.6);
  }
  const auto peaks = find_peaks(omegas, trace);
  REQUIRE(peaks.size() == 2);
  CHECK(peaks[0].center_ghz < peaks[1].center_ghz);
  CHECK(peaks[0].center_ghz == doctest::Approx(5.38).epsilon(1e-4));
  CHECK(peaks[1].center_ghz == doctest::Approx(5.62).epsilon(1e-4));
  CHECK(peaks[0].fwhm_mhz == doctest::Approx(40.0).epsilon(0.03));
  CHECK(peaks[1].fwhm_mhz == doctest::Approx(25.0).epsilon(0.03));
}

TEST_CASE("find_peaks drops low-prominence shoulders") {
  const std::vector<double> omegas = linspace(5.2, 5.8, 601);
  std::vector<double> trace(omegas.size());
  for (size_t i = 0; i < omegas.size(); ++i) {
    trace[i] = lorentzian(omegas[i], 5.5, 60.0, 1.0) +
               lorentzian(omegas[i], 5.66, 8.0, 0.03);
  }
  CHECK(find_peaks(omegas, trace, 0.05).size() == 1);
  CHECK(find_peaks(omegas, trace, 0.005).size() == 2);
}

TEST_CASE("find_peaks input contract") {
  const std::vector<double> short_grid = linspace(5.0, 5.1, 8);
  std::vector<double> short_trace(short_grid.size(), 1.0);
  CHECK_THROWS_AS(find_peaks(short_grid, short_trace), std::invalid_argument);

  std::vector<double> uneven = linspace(5.0, 5.5, 32);
  uneven[10] += 0.004;
  std::vector<double> trace(uneven.size(), 1.0);
  CHECK_THROWS_AS(find_peaks(uneven, trace), std::invalid_argument);

  std::vector<double> mismatched(31, 1.0);
  CHECK_THROWS_AS(find_peaks(linspace(5.0, 5.5, 32), mismatched),
                  std::invalid_argument);
}

TEST_CASE("find_peaks: monotone trace has no interior maxima") {
  const std::vector<double> omegas = linspace(5.0, 5.5, 64);
  std::vector<double> rising(omegas.size());
  for (size_t i = 0; i < omegas.size(); ++i) {
    rising[i] = static_cast<double>(i);
  }
  CHECK(find_peaks(omegas, rising).empty());
}

TEST_CASE("find_peaks reports NaN width when a flank is cut off") {
  // Window ends above the half-height point on the right flank (but low
  // enough that the peak keeps its topographic prominence).
  const std::vector<double> omegas = linspace(5.44, 5.508, 43);
  std::vector<double> trace(omegas.size());
  for (size_t i = 0; i < omegas.size(); ++i) {
    trace[i] = lorentzian(omegas[i], 5.5, 40.0, 1.0);
  }
  const auto peaks = find_peaks(omegas, trace);
  REQUIRE(peaks.size() == 1);
  CHECK(std::isnan(peaks[0].fwhm_mhz));
}

TEST_CASE("level-repulsion fit: exact round trip at zero noise") {
  const MagnonSpec magnon = tuning_magnon();
  const TrueParams truth = {45.0, 5510.0, 38.0, 16.0};
  const std::vector<double> currents = linspace(5.35, 5.65, 31);
  std::vector<BranchPoint> upper, lower;
  std::mt19937 rng(7);
  synthesize(truth, magnon, currents, 0.0, rng, upper, lower);

  const FitResult fit = fit_level_repulsion(upper, lower, magnon);
  CHECK(fit.converged);
  CHECK(fit.g_mhz == doctest::Approx(truth.g_mhz).epsilon(1e-6));
  CHECK(fit.omega_m_ghz * 1e3 ==
        doctest::Approx(truth.omega_m_mhz).epsilon(1e-9));
  CHECK(fit.residual < 1e-6);
  CHECK(fit.warnings.empty());
  for (double variance : fit.covariance_diag) {
    CHECK(std::isfinite(variance));
    CHECK(variance >= 0.0);
  }
}

TEST_CASE("level-repulsion fit is symmetric under branch exchange") {
  const MagnonSpec magnon = tuning_magnon();
  const TrueParams truth = {60.0, 5480.0, 25.0, 10.0};
  const std::vector<double> currents = linspace(5.25, 5.6, 25);
  std::vector<BranchPoint> upper, lower;
  std::mt19937 rng(11);
  synthesize(truth, magnon, currents, 0.0, rng, upper, lower);

  const FitResult a = fit_level_repulsion(upper, lower, magnon);
  const FitResult b = fit_level_repulsion(lower, upper, magnon);
  CHECK(a.g_mhz == doctest::Approx(b.g_mhz).epsilon(1e-9));
  CHECK(a.omega_m_ghz == doctest::Approx(b.omega_m_ghz).epsilon(1e-12));
}

TEST_CASE("level-repulsion fit tolerates scrambled branch labels") {
  // The objective matches samples to the nearer model branch, so swapping a
  // few labels between the input traces must not bias the result.
  const MagnonSpec magnon = tuning_magnon();
  const TrueParams truth = {52.0, 5495.0, 30.0, 12.0};
  const std::vector<double> currents = linspace(5.3, 5.62, 29);
  std::vector<BranchPoint> upper, lower;
  std::mt19937 rng(23);
  synthesize(truth, magnon, currents, 0.0, rng, upper, lower);
  // Scramble interior samples only: the initial guess reads the trace ends as
  // asymptotes, and a corrupted endpoint is a different (documented) failure.
  for (size_t i = 2; i < upper.size(); i += 5) {
    std::swap(upper[i], lower[i]);
  }

  const FitResult fit = fit_level_repulsion(upper, lower, magnon);
  CHECK(fit.converged);
  CHECK(fit.g_mhz == doctest::Approx(truth.g_mhz).epsilon(1e-6));
}

TEST_CASE("level-repulsion fit under one-percent frequency noise") {
  const MagnonSpec magnon = tuning_magnon();
  const TrueParams truth = {75.0, 5505.0, 42.0, 18.0};
  const std::vector<double> currents = linspace(5.3, 5.68, 41);
  std::vector<BranchPoint> upper, lower;
  std::mt19937 rng(2026);
  synthesize(truth, magnon, currents, 0.01 * truth.g_mhz, rng, upper, lower);

  const FitResult fit = fit_level_repulsion(upper, lower, magnon);
  CHECK(fit.converged);
  CHECK(std::abs(fit.g_mhz - truth.g_mhz) / truth.g_mhz < 0.05);
  CHECK(fit.residual < 3.0 * 0.01 * truth.g_mhz);
}

TEST_CASE("level-repulsion fit honors a caller-supplied start") {
  const MagnonSpec magnon = tuning_magnon();
  const TrueParams truth = {45.0, 5510.0, 38.0, 16.0};
  const std::vector<double> currents = linspace(5.35, 5.65, 31);
  std::vector<BranchPoint> upper, lower;
  std::mt19937 rng(3);
  synthesize(truth, magnon, currents, 0.0, rng, upper, lower);

  FitResult start;
  start.g_mhz = 30.0;
  start.omega_m_ghz = 5.52;
  start.loss_m_mhz = 20.0;
  start.gamma_n_mhz = 20.0;
  const FitResult fit = fit_level_repulsion(upper, lower, magnon, &start);
  CHECK(fit.converged);
  CHECK(fit.g_mhz == doctest::Approx(truth.g_mhz).epsilon(1e-6));
}

TEST_CASE("level-repulsion fit input contract") {
  const MagnonSpec magnon = tuning_magnon();
  std::vector<BranchPoint> five = {{5.30, 5.45}, {5.35, 5.46}, {5.40, 5.47},
                                   {5.45, 5.48}, {5.50, 5.49}};
  std::vector<BranchPoint> six = five;
  six.push_back({5.55, 5.50});
  CHECK_THROWS_AS(fit_level_repulsion(five, six, magnon),
                  std::invalid_argument);
  CHECK_THROWS_AS(fit_level_repulsion(six, five, magnon),
                  std::invalid_argument);
}

TEST_CASE("weak coupling below the gap resolution is flagged") {
  // Branches that never appreciably repel each other cannot pin g.
  const MagnonSpec magnon = tuning_magnon();
  const TrueParams truth = {0.05, 5500.0, 30.0, 16.0};
  const std::vector<double> currents = linspace(5.35, 5.6, 21);
  std::vector<BranchPoint> upper, lower;
  std::mt19937 rng(5);
  synthesize(truth, magnon, currents, 0.0, rng, upper, lower);

  const FitResult fit = fit_level_repulsion(upper, lower, magnon);
  REQUIRE_FALSE(fit.warnings.empty());
  CHECK(contains(fit.warnings.front(), "identif"));
}

TEST_CASE("fit result JSON carries the contract keys") {
  const MagnonSpec magnon = tuning_magnon();
  const TrueParams truth = {45.0, 5510.0, 38.0, 16.0};
  const std::vector<double> currents = linspace(5.35, 5.65, 31);
  std::vector<BranchPoint> upper, lower;
  std::mt19937 rng(9);
  synthesize(truth, magnon, currents, 0.0, rng, upper, lower);
  const FitResult fit = fit_level_repulsion(upper, lower, magnon);

  const nlohmann::json doc = nlohmann::json::parse(fit.to_json());
  CHECK(doc.size() == 6);
  for (const char* key : {"g_mhz", "omega_m_ghz", "loss_m_mhz", "gamma_n_mhz",
                          "residual", "converged"}) {
    CHECK(doc.contains(key));
  }
  CHECK(doc["converged"].is_boolean());
}

TEST_CASE("extract_linewidth reads half widths off a map cut") {
  // Far-detuned magnon: the mid-gap edge resonance is the only line in the
  // window and serves both branch labels.
  MagnonSpec magnon = tuning_magnon();
  magnon.g0_mhz = 144.81;
  PortConfig ports;
  ports.port1_site = 1;
  ports.port2_site = 0;
  ports.kappa1_mhz = ports.kappa2_mhz = 10.0;
  const double far_current = (6.98 - magnon.c0_ghz) / magnon.c1_ghz_per_a;
  // The window stays inside the bulk gap (innermost band modes sit near
  // 5.34 and 5.62), so the cut holds a single resonance.
  const TransmissionMap map =
      transmission_map(lossy_chain(), magnon, ports, {far_current},
                       linspace(5.36, 5.60, 801));

  const double lower = extract_linewidth(map, Branch::lower, far_current);
  const double upper = extract_linewidth(map, Branch::upper, far_current);
  CHECK(lower == doctest::Approx(upper).epsilon(1e-12));
  // Dominated by the low-loss edge mode (40.42 MHz) plus a small port load.
  CHECK(lower == doctest::Approx(41.0029).epsilon(5e-3));

  CHECK_THROWS_AS(extract_linewidth(map, Branch::lower, far_current + 1.0),
                  std::invalid_argument);
}

TEST_CASE("extract_linewidth distinguishes resolved branches") {
  // Hand-built map: each cut holds two well-separated lines of known width,
  // swapped between the two current rows to pin both the lower/upper labels
  // and the nearest-row selection.
  TransmissionMap map;
  map.currents_a = {1.0, 2.0};
  map.omegas_ghz = linspace(5.30, 5.74, 881);
  const int n = static_cast<int>(map.omegas_ghz.size());
  map.s21_sq.resize(2, n);
  map.a1 = Eigen::MatrixXd::Zero(2, n);
  map.a2 = Eigen::MatrixXd::Zero(2, n);
  for (int c = 0; c < n; ++c) {
    const double w = map.omegas_ghz[static_cast<size_t>(c)];
    map.s21_sq(0, c) =
        lorentzian(w, 5.38, 30.0, 1.0) + lorentzian(w, 5.66, 70.0, 0.8);
    map.s21_sq(1, c) =
        lorentzian(w, 5.38, 70.0, 1.0) + lorentzian(w, 5.66, 30.0, 0.8);
  }

  // First row: narrow line below, broad line above (the overlapping tails
  // stretch both widths by about one percent).
  CHECK(extract_linewidth(map, Branch::lower, 1.0) ==
        doctest::Approx(15.1911).epsilon(1e-3));
  CHECK(extract_linewidth(map, Branch::upper, 1.0) ==
        doctest::Approx(35.1384).epsilon(1e-3));
  CHECK(extract_linewidth(map, Branch::lower, 1.0) <
        extract_linewidth(map, Branch::upper, 1.0));

  // Nearest-row selection: 1.4 A still reads the first cut, 1.6 A the second,
  // where the two widths are swapped.
  CHECK(extract_linewidth(map, Branch::lower, 1.4) ==
        doctest::Approx(15.1911).epsilon(1e-3));
  CHECK(extract_linewidth(map, Branch::lower, 1.6) ==
        doctest::Approx(35.0885).epsilon(1e-3));
  CHECK(extract_linewidth(map, Branch::upper, 1.6) ==
        doctest::Approx(15.2987).epsilon(1e-3));
}

TEST_CASE("extract_linewidth refuses a flank it cannot measure") {
  // Full bare coupling at the end site: the polaritons are pushed against the
  // innermost band resonances and their outer half-height crossings climb
  // into the bulk shoulders, so no honest width exists.
  MagnonSpec magnon = tuning_magnon();
  magnon.g0_mhz = 144.81;
  PortConfig ports;
  ports.port1_site = 1;
  ports.port2_site = 0;
  ports.kappa1_mhz = ports.kappa2_mhz = 10.0;
  const double resonant_current = (5.48 - magnon.c0_ghz) / magnon.c1_ghz_per_a;
  const TransmissionMap map =
      transmission_map(lossy_chain(), magnon, ports, {resonant_current},
                       linspace(5.30, 5.66, 1441));
  const std::string msg = testsupport::thrown_message<std::runtime_error>(
      [&] { extract_linewidth(map, Branch::lower, resonant_current); });
  CHECK(testsupport::contains(msg, "half-height crossing missing"));
}
