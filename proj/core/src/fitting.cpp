#include "topolattice/fitting.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json_detail.hpp"
#include "topolattice/format.hpp"

namespace topolattice {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Topographic prominence of the local maximum at index i: height above the
// higher of the two saddle minima separating it from taller terrain (or from
// the trace ends).
double prominence_at(const std::vector<double>& v, size_t i) {
  double saddle = -std::numeric_limits<double>::infinity();
  for (int dir : {-1, +1}) {
    double lowest = v[i];
    for (size_t j = i; dir < 0 ? j > 0 : j + 1 < v.size();) {
      j = static_cast<size_t>(static_cast<long>(j) + dir);
      lowest = std::min(lowest, v[j]);
      if (v[j] > v[i]) break;
    }
    saddle = std::max(saddle, lowest);
  }
  return v[i] - saddle;
}

// First half-height crossing walking from the peak; NaN when the trace ends
// or climbs above the peak before crossing.
double half_crossing(const std::vector<double>& omegas, const std::vector<double>& v,
                     size_t i, double half, double peak_height, int dir) {
  size_t j = i;
  while (dir < 0 ? j > 0 : j + 1 < v.size()) {
    const size_t prev = j;
    j = static_cast<size_t>(static_cast<long>(j) + dir);
    if (v[j] > peak_height) return kNan;
    if (v[j] <= half) {
      const double f = (v[prev] - half) / (v[prev] - v[j]);
      return omegas[prev] + f * (omegas[j] - omegas[prev]);
    }
  }
  return kNan;
}

}  // namespace

std::vector<Peak> find_peaks(const std::vector<double>& omegas_ghz,
                             const std::vector<double>& values,
                             double prominence_frac) {
  if (omegas_ghz.size() != values.size()) {
    throw std::invalid_argument("find_peaks: grid and trace lengths differ");
  }
  if (values.size() < 16) {
    throw std::invalid_argument("find_peaks: need at least 16 samples");
  }
  const double step = (omegas_ghz.back() - omegas_ghz.front()) /
                      static_cast<double>(omegas_ghz.size() - 1);
  if (step <= 0) {
    throw std::invalid_argument("find_peaks: grid must be ascending");
  }
  for (size_t i = 1; i < omegas_ghz.size(); ++i) {
    if (std::abs(omegas_ghz[i] - omegas_ghz[i - 1] - step) > 1e-9 * std::abs(step)) {
      throw std::invalid_argument("find_peaks: grid must be uniform");
    }
  }

  const double global_max = *std::max_element(values.begin(), values.end());
  const double threshold = prominence_frac * global_max;
  std::vector<Peak> peaks;
  for (size_t i = 1; i + 1 < values.size(); ++i) {
    if (!(values[i] > values[i - 1] && values[i] >= values[i + 1])) continue;
    if (prominence_at(values, i) < threshold) continue;

    Peak peak;
    double height = values[i];
    double center = omegas_ghz[i];
    if (values[i - 1] > 0 && values[i] > 0 && values[i + 1] > 0) {
      const double yl = std::log(values[i - 1]);
      const double yc = std::log(values[i]);
      const double yr = std::log(values[i + 1]);
      const double curv = yl - 2.0 * yc + yr;
      if (curv < 0) {
        const double delta = 0.5 * (yl - yr) / curv;
        center += delta * step;
        height = std::exp(yc - 0.25 * (yl - yr) * delta);
      }
    }
    peak.center_ghz = center;
    peak.height = height;

    const double half = height / 2.0;
    const double left = half_crossing(omegas_ghz, values, i, half, height, -1);
    const double right = half_crossing(omegas_ghz, values, i, half, height, +1);
    peak.fwhm_mhz = (right - left) * 1e3;  // NaN propagates from either side
    peaks.push_back(peak);
  }
  std::sort(peaks.begin(), peaks.end(),
            [](const Peak& a, const Peak& b) { return a.center_ghz < b.center_ghz; });
  return peaks;
}

namespace {

struct Objective {
  std::vector<double> currents;
  std::vector<double> omegas_mhz;
  double c0_mhz = 0.0;
  double c1_mhz_per_a = 0.0;

  // theta = (g, omega_m, loss_m, gamma_n), all MHz. Signed distance from each
  // sample to the nearer hybrid branch.
  Eigen::VectorXd residuals(const Eigen::Vector4d& theta) const {
    Eigen::VectorXd r(currents.size());
    for (size_t i = 0; i < currents.size(); ++i) {
      const Complex on{c0_mhz + c1_mhz_per_a * currents[i], -theta(3)};
      const Complex om{theta(1), -theta(2)};
      const auto [plus, minus] = two_mode_hybrid(on, om, std::abs(theta(0)));
      const double d_plus = plus.real() - omegas_mhz[i];
      const double d_minus = minus.real() - omegas_mhz[i];
      r(static_cast<Eigen::Index>(i)) =
          std::abs(d_plus) < std::abs(d_minus) ? d_plus : d_minus;
    }
    return r;
  }
};

}  // namespace

FitResult fit_level_repulsion(const std::vector<BranchPoint>& branch_a,
                              const std::vector<BranchPoint>& branch_b,
                              const MagnonSpec& magnon, const FitResult* init) {
  if (branch_a.size() < 6 || branch_b.size() < 6) {
    throw std::invalid_argument(
        "fit_level_repulsion: need at least 6 points per branch");
  }

  Objective obj;
  obj.c0_mhz = magnon.c0_ghz * 1e3;
  obj.c1_mhz_per_a = magnon.c1_ghz_per_a * 1e3;
  for (const auto& batch : {branch_a, branch_b}) {
    for (const auto& p : batch) {
      obj.currents.push_back(p.current_a);
      obj.omegas_mhz.push_back(p.omega_ghz * 1e3);
    }
  }
  const Eigen::Index m = static_cast<Eigen::Index>(obj.currents.size());

  // Minimum vertical branch gap, pairing each a-point with the b-point at the
  // nearest current; doubles as the coupling initializer.
  double min_gap = std::numeric_limits<double>::infinity();
  for (const auto& pa : branch_a) {
    double best_dc = std::numeric_limits<double>::infinity();
    double gap = 0.0;
    for (const auto& pb : branch_b) {
      const double dc = std::abs(pb.current_a - pa.current_a);
      if (dc < best_dc) {
        best_dc = dc;
        gap = std::abs(pb.omega_ghz - pa.omega_ghz) * 1e3;
      }
    }
    min_gap = std::min(min_gap, gap);
  }

  Eigen::Matrix<double, Eigen::Dynamic, 4> jac(m, 4);
  auto fill_jacobian = [&](const Eigen::Vector4d& at, const Eigen::VectorXd& base) {
    for (int j = 0; j < 4; ++j) {
      const double step = std::max(1e-6 * std::abs(at(j)), 1e-8);
      Eigen::Vector4d probe = at;
      probe(j) += step;
      jac.col(j) = (obj.residuals(probe) - base) / step;
    }
  };

  struct LmState {
    Eigen::Vector4d theta;
    Eigen::VectorXd r;
    double ssr = std::numeric_limits<double>::infinity();
    bool converged = false;
  };

  auto run_lm = [&](Eigen::Vector4d theta0) {
    LmState state;
    state.theta = theta0;
    state.r = obj.residuals(state.theta);
    state.ssr = state.r.squaredNorm();
    double lambda = 1e-3;
    for (int iter = 0; iter < 200 && !state.converged; ++iter) {
      fill_jacobian(state.theta, state.r);
      const Eigen::Matrix4d jtj = jac.transpose() * jac;
      const Eigen::Vector4d jtr = jac.transpose() * state.r;
      // Stationary point: the gradient has sunk to the finite-difference noise
      // floor, so no further descent is possible even when residuals remain.
      if (jtr.lpNorm<Eigen::Infinity>() <
          1e-5 * std::max(1.0, std::sqrt(state.ssr / static_cast<double>(m)))) {
        state.converged = true;
        break;
      }
      Eigen::Matrix4d damped = jtj;
      const double floor = 1e-12 * std::max(1.0, jtj.diagonal().maxCoeff());
      for (int j = 0; j < 4; ++j) {
        damped(j, j) += lambda * std::max(jtj(j, j), floor);
      }
      const Eigen::Vector4d delta = damped.ldlt().solve(-jtr);
      Eigen::Vector4d trial = state.theta + delta;
      trial(0) = std::abs(trial(0));  // the model is even in g
      trial(2) = std::max(trial(2), 0.0);  // losses are physical rates; the
      trial(3) = std::max(trial(3), 0.0);  // objective only sees |difference|
      const Eigen::VectorXd r_trial = obj.residuals(trial);
      const double ssr_trial = r_trial.squaredNorm();
      // Strict relative improvement: steps along the flat loss-sum direction
      // leave the objective unchanged and must not be accepted.
      if (ssr_trial < state.ssr * (1.0 - 1e-12)) {
        const double rel_step = delta.norm() / (state.theta.norm() + 1e-12);
        state.theta = trial;
        state.r = r_trial;
        state.ssr = ssr_trial;
        lambda = std::max(lambda / 10.0, 1e-12);
        if (rel_step < 1e-10) state.converged = true;
      } else {
        lambda = std::min(lambda * 10.0, 1e12);
        if (lambda >= 1e12) break;
      }
    }
    return state;
  };

  LmState best;
  if (init) {
    Eigen::Vector4d theta0;
    theta0 << init->g_mhz, init->omega_m_ghz * 1e3, init->loss_m_mhz,
        init->gamma_n_mhz;
    best = run_lm(theta0);
  } else {
    // omega_m: average the endpoint of each trace that sits farthest from the
    // bare magnon line (the photon-like asymptote).
    auto photon_end = [&](const std::vector<BranchPoint>& b) {
      const BranchPoint& lo = b.front();
      const BranchPoint& hi = b.back();
      const double d_lo = std::abs(lo.omega_ghz - magnon.omega_n_ghz(lo.current_a));
      const double d_hi = std::abs(hi.omega_ghz - magnon.omega_n_ghz(hi.current_a));
      return d_lo > d_hi ? lo.omega_ghz : hi.omega_ghz;
    };
    const double omega_m0 =
        (photon_end(branch_a) + photon_end(branch_b)) / 2.0 * 1e3;

    // The branches only see the losses through |loss_m - gamma_n|, and equal
    // losses are a stationary manifold of the objective: a fit started there
    // cannot develop a contrast. Estimate the contrast from the data instead:
    // far from resonance the separation approaches sqrt(detuning^2 + 4 g^2),
    // while the resonant gap is sqrt(4 g^2 - contrast^2).
    double g_far_sq = 0.0;
    for (const bool tail : {false, true}) {
      const BranchPoint& pa = tail ? branch_a.back() : branch_a.front();
      const BranchPoint& pb = tail ? branch_b.back() : branch_b.front();
      const double detuning = magnon.omega_n_ghz(pa.current_a) * 1e3 - omega_m0;
      const double separation = std::abs(pa.omega_ghz - pb.omega_ghz) * 1e3;
      g_far_sq = std::max(
          g_far_sq, (separation * separation - detuning * detuning) / 4.0);
    }
    const double contrast0 =
        std::sqrt(std::max(0.0, 4.0 * g_far_sq - min_gap * min_gap));
    const double g0 = std::max(min_gap / 2.0, std::sqrt(g_far_sq));

    Eigen::Vector4d contrasted, symmetric;
    contrasted << g0, omega_m0, magnon.gamma_n_mhz + contrast0,
        magnon.gamma_n_mhz;
    symmetric << min_gap / 2.0, omega_m0, magnon.gamma_n_mhz,
        magnon.gamma_n_mhz;
    best = run_lm(contrasted);
    const LmState fallback = run_lm(symmetric);
    if (fallback.ssr < best.ssr) best = fallback;
  }

  const Eigen::Vector4d theta = best.theta;
  const Eigen::VectorXd r = best.r;
  const double ssr = best.ssr;
  const bool converged = best.converged;

  FitResult out;
  out.g_mhz = std::abs(theta(0));
  out.omega_m_ghz = theta(1) * 1e-3;
  out.loss_m_mhz = theta(2);
  out.gamma_n_mhz = theta(3);
  out.residual = std::sqrt(ssr / static_cast<double>(m));
  out.converged = converged;

  fill_jacobian(theta, r);
  const Eigen::Matrix4d jtj = jac.transpose() * jac;
  if (m > 4) {
    const double sigma_sq = ssr / static_cast<double>(m - 4);
    const Eigen::Matrix4d cov =
        sigma_sq * jtj.completeOrthogonalDecomposition().pseudoInverse();
    for (int j = 0; j < 4; ++j) out.covariance_diag[static_cast<size_t>(j)] = cov(j, j);
  } else {
    out.covariance_diag.fill(kNan);
  }

  if (min_gap > 4.0 * out.g_mhz ||
      out.g_mhz <= std::max(2.0 * out.residual, 1e-9 * std::abs(theta(1)))) {
    out.warnings.push_back(
        "weak identifiability: branches never approach within the fitted coupling");
  }
  return out;
}

std::string FitResult::to_json() const {
  detail::json doc;
  doc["g_mhz"] = g_mhz;
  doc["omega_m_ghz"] = omega_m_ghz;
  doc["loss_m_mhz"] = loss_m_mhz;
  doc["gamma_n_mhz"] = gamma_n_mhz;
  doc["residual"] = residual;
  doc["converged"] = converged;
  return doc.dump(2);
}

double extract_linewidth(const TransmissionMap& map, Branch branch,
                         double at_current_a) {
  if (map.currents_a.empty() || map.omegas_ghz.empty()) {
    throw std::invalid_argument("extract_linewidth: empty map");
  }
  if (at_current_a < map.currents_a.front() || at_current_a > map.currents_a.back()) {
    throw std::invalid_argument("extract_linewidth: current outside the sweep");
  }
  size_t row = 0;
  double best = std::numeric_limits<double>::infinity();
  for (size_t t = 0; t < map.currents_a.size(); ++t) {
    const double d = std::abs(map.currents_a[t] - at_current_a);
    if (d < best) {
      best = d;
      row = t;
    }
  }

  std::vector<double> cut(map.omegas_ghz.size());
  for (size_t c = 0; c < cut.size(); ++c) {
    cut[c] = map.s21_sq(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(c));
  }
  std::vector<Peak> peaks = find_peaks(map.omegas_ghz, cut);
  if (peaks.empty()) {
    throw std::runtime_error("extract_linewidth: no resolvable peak at current " +
                             format_double(at_current_a) + " A");
  }
  if (peaks.size() > 2) {
    std::sort(peaks.begin(), peaks.end(),
              [](const Peak& a, const Peak& b) { return a.height > b.height; });
    peaks.resize(2);
    std::sort(peaks.begin(), peaks.end(),
              [](const Peak& a, const Peak& b) { return a.center_ghz < b.center_ghz; });
  }
  const Peak& chosen = (branch == Branch::lower || peaks.size() == 1)
                           ? peaks.front()
                           : peaks.back();
  if (!std::isfinite(chosen.fwhm_mhz)) {
    throw std::runtime_error(
        "extract_linewidth: half-height crossing missing at current " +
        format_double(at_current_a) + " A");
  }
  return chosen.fwhm_mhz / 2.0;
}

}  // namespace topolattice
