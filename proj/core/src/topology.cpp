#include "topolattice/topology.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "topolattice/format.hpp"
#include "topolattice/parallel.hpp"
#include "topolattice/spectrum.hpp"

namespace topolattice {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Phase winding of f around the closed k-loop, as a multiple of 2*pi.
// Principal-branch increments between consecutive samples; accurate whenever
// the grid resolves the fastest phase variation (guaranteed for n_k >= 64 on
// these two-term loops away from zeros).
double loop_winding(const std::function<Complex(double)>& f, int n_k,
                    double zero_scale) {
  if (n_k < 64) {
    throw std::invalid_argument("winding: k-grid must have at least 64 points");
  }
  const double floor = 1e-12 * zero_scale;
  double total = 0.0;
  const Complex first = f(0.0);
  Complex prev = first;
  for (int j = 1; j <= n_k; ++j) {
    const Complex cur = j == n_k ? first : f(kTwoPi * j / n_k);
    if (std::abs(prev) <= floor || std::abs(cur) <= floor) {
      throw std::runtime_error(
          "winding: Bloch loop passes through zero (|v| = |w| criticality)");
    }
    total += std::arg(cur / prev);
    prev = cur;
  }
  return total / kTwoPi;
}

int require_integer(double value, const char* what) {
  const double rounded = std::round(value);
  if (std::abs(value - rounded) > 0.01) {
    throw std::runtime_error(std::string(what) + ": raw winding " +
                             std::to_string(value) +
                             " is not an integer (criticality or insufficient grid)");
  }
  return static_cast<int>(rounded);
}

// Minimum over mode pairs of |lambda_i - lambda_j| plus the attaining pair.
struct PairGap {
  double gap = std::numeric_limits<double>::infinity();
  int i = 0;  // 0-based sorted indices, i < j
  int j = 0;
};

PairGap min_pair_gap(const Spectrum& spectrum) {
  PairGap best;
  const int n = static_cast<int>(spectrum.modes.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double gap = std::abs(spectrum.modes[i].value_mhz() -
                                  spectrum.modes[j].value_mhz());
      if (gap < best.gap) best = {gap, i, j};
    }
  }
  return best;
}

Spectrum spectrum_at(const LatticeSpec& spec, double delta_gamma) {
  return eigendecompose(build_chain_hamiltonian(with_delta_gamma(spec, delta_gamma)));
}

// Golden-section minimization of the pair gap over [a, b].
double refine_gap_minimum(const LatticeSpec& spec, double a, double b) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  const double tol = 1e-9 * std::max(1.0, b);
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = min_pair_gap(spectrum_at(spec, x1)).gap;
  double f2 = min_pair_gap(spectrum_at(spec, x2)).gap;
  for (int iter = 0; iter < 200 && (b - a) > tol; ++iter) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = min_pair_gap(spectrum_at(spec, x1)).gap;
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = min_pair_gap(spectrum_at(spec, x2)).gap;
    }
  }
  return (a + b) / 2.0;
}

double boundary_weight(const EigenMode& mode) {
  const Eigen::Index last = mode.amplitudes.size() - 1;
  return std::norm(mode.amplitudes(0)) + std::norm(mode.amplitudes(last));
}

}  // namespace

const char* to_string(EpKind k) { return k == EpKind::edge ? "edge" : "bulk"; }

int winding_hermitian(const LatticeSpec& spec, int n_k) {
  spec.validate();
  const double scale =
      std::abs(spec.v_mhz) + std::abs(spec.w_mhz) + 2.0 * std::abs(spec.hopping_imag_mhz);
  const double raw = loop_winding(
      [&](double k) { return bloch_offdiagonal(spec, k); }, n_k, scale);
  // Negate: the ascending-k loop of exp(-ik) runs clockwise, and the sign
  // convention here counts the topological dimerization as +1.
  return require_integer(-raw, "winding_hermitian");
}

int winding_generalized(const LatticeSpec& spec, int n_k) {
  spec.validate();
  const double half_contrast = spec.delta_gamma_mhz() / 2.0;
  const double gap = std::abs(spec.w_mhz - spec.v_mhz);
  if (std::abs(half_contrast) >= gap) {
    throw std::domain_error(
        "winding_generalized: |delta_gamma|/2 >= |w - v| (PT-broken bulk, "
        "winding undefined)");
  }
  const double c2 = half_contrast * half_contrast;
  const double scale = std::pow(
      std::abs(spec.v_mhz) + std::abs(spec.w_mhz) + 2.0 * std::abs(spec.hopping_imag_mhz),
      2);
  const double raw = loop_winding(
      [&](double k) {
        return bloch_offdiagonal(spec, k) * std::conj(bloch_offdiagonal(spec, -k)) - c2;
      },
      n_k, scale + c2);
  const double half = -raw / 2.0;
  return require_integer(half, "winding_generalized");
}

double bulk_sptb_threshold(const LatticeSpec& spec) {
  spec.validate();
  return 2.0 * std::abs(spec.w_mhz - spec.v_mhz);
}

EpReport edge_sptb_threshold(const LatticeSpec& spec) {
  spec.validate();
  if (spec.v_mhz >= spec.w_mhz) {
    throw std::domain_error("edge_sptb_threshold: requires v < w (edge modes)");
  }

  // True when the mid-gap pair's loss splitting exceeds its real splitting.
  auto broken = [&](double delta_gamma, int* lo_mode, int* hi_mode) {
    Spectrum s = spectrum_of(with_delta_gamma(spec, delta_gamma));
    std::vector<const EigenMode*> edge;
    for (const auto& mode : s.modes) {
      if (mode.cls == ModeClass::edge) edge.push_back(&mode);
    }
    if (edge.size() != 2) {
      throw std::runtime_error("edge_sptb_threshold: expected 2 mid-gap modes, found " +
                               std::to_string(edge.size()));
    }
    if (lo_mode) *lo_mode = edge[0]->m;
    if (hi_mode) *hi_mode = edge[1]->m;
    const double re_split = std::abs(edge[0]->re_ghz - edge[1]->re_ghz) * 1e3;
    const double loss_split = std::abs(edge[0]->loss_mhz - edge[1]->loss_mhz);
    return loss_split > re_split;
  };

  double lo = 0.0;
  double hi = bulk_sptb_threshold(spec);
  if (broken(lo, nullptr, nullptr)) {
    throw std::runtime_error("edge_sptb_threshold: mid-gap pair already broken at delta_gamma=0");
  }
  if (!broken(hi, nullptr, nullptr)) {
    throw std::runtime_error(
        "edge_sptb_threshold: mid-gap pair unbroken up to the bulk threshold");
  }
  while (hi - lo > 1e-6 * std::max(hi, 1e-3)) {
    const double mid = (lo + hi) / 2.0;
    (broken(mid, nullptr, nullptr) ? hi : lo) = mid;
  }

  EpReport report;
  report.delta_gamma_c_mhz = (lo + hi) / 2.0;
  report.normalized = report.delta_gamma_c_mhz / (2.0 * (spec.v_mhz + spec.w_mhz));
  report.kind = EpKind::edge;
  broken(hi, &report.mode_i, &report.mode_j);
  if (report.mode_i > report.mode_j) std::swap(report.mode_i, report.mode_j);
  return report;
}

ThresholdScaling threshold_vs_length(const LatticeSpec& spec,
                                     const std::vector<int>& n_values) {
  ThresholdScaling out;
  out.points.reserve(n_values.size());
  for (int n : n_values) {
    if (n < 2) {
      throw std::invalid_argument("threshold_vs_length: N=" + std::to_string(n) +
                                  " is below the minimum chain length 2");
    }
    LatticeSpec local = spec;
    local.n_cells = n;
    try {
      out.points.push_back({n, edge_sptb_threshold(local).delta_gamma_c_mhz});
    } catch (const std::exception& e) {
      throw std::runtime_error("threshold_vs_length: N=" + std::to_string(n) + ": " +
                               e.what());
    }
  }

  const size_t n_pts = out.points.size();
  if (n_pts < 2) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.slope = out.intercept = out.r_squared = nan;
    return out;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : out.points) {
    const double x = p.n_cells;
    const double y = std::log(p.delta_gamma_c_mhz);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(n_pts);
  out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  out.intercept = (sy - out.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double mean_y = sy / n;
  for (const auto& p : out.points) {
    const double y = std::log(p.delta_gamma_c_mhz);
    const double fit = out.slope * p.n_cells + out.intercept;
    ss_res += (y - fit) * (y - fit);
    ss_tot += (y - mean_y) * (y - mean_y);
  }
  out.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return out;
}

std::string ThresholdScaling::to_csv() const {
  std::string out;
  std::vector<std::string> fields = {"n_cells", "delta_gamma_c_mhz", "r_squared"};
  csv_row(out, fields.data(), 3);
  for (const auto& p : points) {
    fields = {format_int(p.n_cells), format_double(p.delta_gamma_c_mhz),
              format_double(r_squared)};
    csv_row(out, fields.data(), 3);
  }
  return out;
}

std::vector<EpReport> ep_scan(const LatticeSpec& spec,
                              const std::vector<double>& grid) {
  spec.validate();
  for (size_t t = 1; t < grid.size(); ++t) {
    if (grid[t] <= grid[t - 1]) {
      throw std::invalid_argument("ep_scan: grid must be strictly ascending");
    }
  }
  if (!grid.empty() && grid.front() < 0.0) {
    throw std::invalid_argument("ep_scan: loss contrasts must be nonnegative");
  }
  if (grid.size() < 3) return {};

  std::vector<double> min_gap(grid.size());
  parallel_for(grid.size(), [&](size_t t) {
    min_gap[t] = min_pair_gap(spectrum_at(spec, grid[t])).gap;
  });

  std::vector<EpReport> reports;
  for (size_t t = 1; t + 1 < grid.size(); ++t) {
    if (!(min_gap[t] < min_gap[t - 1] && min_gap[t] <= min_gap[t + 1])) continue;

    const double dg = refine_gap_minimum(spec, grid[t - 1], grid[t + 1]);
    const Spectrum s = spectrum_at(spec, dg);
    const PairGap best = min_pair_gap(s);
    const EigenMode& a = s.modes[static_cast<size_t>(best.i)];
    const EigenMode& b = s.modes[static_cast<size_t>(best.j)];
    const double overlap = std::abs(a.amplitudes.dot(b.amplitudes));
    if (overlap < 0.99) continue;

    EpReport report;
    report.delta_gamma_c_mhz = dg;
    report.normalized = dg / (2.0 * (spec.v_mhz + spec.w_mhz));
    report.mode_i = best.i + 1;
    report.mode_j = best.j + 1;
    report.kind = (boundary_weight(a) + boundary_weight(b)) / 2.0 > 0.25
                      ? EpKind::edge
                      : EpKind::bulk;
    if (!reports.empty() && reports.back().mode_i == report.mode_i &&
        reports.back().mode_j == report.mode_j &&
        std::abs(reports.back().delta_gamma_c_mhz - dg) < 1e-3) {
      continue;  // same EP reached from two overlapping brackets
    }
    reports.push_back(report);
  }
  return reports;
}

std::string ep_csv(const std::vector<EpReport>& reports) {
  std::string out;
  std::vector<std::string> fields = {"delta_gamma_mhz", "normalized", "kind",
                                     "mode_i", "mode_j"};
  csv_row(out, fields.data(), 5);
  for (const auto& r : reports) {
    fields = {format_double(r.delta_gamma_c_mhz), format_double(r.normalized),
              to_string(r.kind), format_int(r.mode_i), format_int(r.mode_j)};
    csv_row(out, fields.data(), 5);
  }
  return out;
}

}  // namespace topolattice
