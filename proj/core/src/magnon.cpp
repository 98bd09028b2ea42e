#include "topolattice/magnon.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json_detail.hpp"
#include "topolattice/format.hpp"
#include "topolattice/parallel.hpp"

namespace topolattice {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kHbar = 1.054571817e-34;  // J*s

const std::vector<std::string> kMagnonKeys = {"site", "g0_mhz", "gamma_n_mhz",
                                              "c0_ghz", "c1_ghz_per_a"};

}  // namespace

void MagnonSpec::validate(int n_sites) const {
  std::vector<std::string> errors;
  if (site < 1 || site > n_sites) {
    errors.push_back("site must lie in 1.." + std::to_string(n_sites));
  }
  if (g0_mhz < 0) errors.push_back("g0_mhz must be >= 0");
  if (gamma_n_mhz < 0) errors.push_back("gamma_n_mhz must be >= 0");
  if (!std::isfinite(c0_ghz)) errors.push_back("c0_ghz must be finite");
  if (!std::isfinite(c1_ghz_per_a)) errors.push_back("c1_ghz_per_a must be finite");
  detail::throw_if_errors(errors, "invalid MagnonSpec");
}

void PhysicalCouplingParams::validate() const {
  std::vector<std::string> errors;
  if (!(eta > 0) || eta > 1) errors.push_back("eta must lie in (0, 1]");
  if (!(chi > 0)) errors.push_back("chi must be > 0");
  if (!(n_spins > 0)) errors.push_back("n_spins must be > 0");
  if (!(spin_s > 0)) errors.push_back("spin_s must be > 0");
  if (!(omega_r > 0)) errors.push_back("omega_r must be > 0");
  if (!(mode_volume > 0)) errors.push_back("mode_volume must be > 0");
  detail::throw_if_errors(errors, "invalid PhysicalCouplingParams");
}

double g_from_physical(const PhysicalCouplingParams& params, double calibration) {
  params.validate();
  if (!(calibration > 0)) {
    throw std::invalid_argument("g_from_physical: calibration must be > 0");
  }
  return calibration * params.eta * params.chi *
         std::sqrt(params.n_spins * params.spin_s * kHbar * params.omega_r /
                   (2.0 * params.mode_volume));
}

ComplexMatrix build_coupled_hamiltonian(const ComplexMatrix& h,
                                        const MagnonSpec& magnon,
                                        double omega_n_ghz) {
  const Eigen::Index n = h.values.rows();
  if (n == 0 || h.values.cols() != n) {
    throw std::invalid_argument("build_coupled_hamiltonian: chain matrix must be square");
  }
  magnon.validate(static_cast<int>(n));

  ComplexMatrix out;
  out.ref_mhz = h.ref_mhz;
  out.values = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  out.values.topLeftCorner(n, n) = h.values;
  out.values(n, n) = omega_n_ghz * 1e3 - h.ref_mhz - kI * magnon.gamma_n_mhz;
  const Eigen::Index s = magnon.site - 1;
  out.values(n, s) = magnon.g0_mhz;
  out.values(s, n) = magnon.g0_mhz;
  return out;
}

std::pair<Complex, Complex> two_mode_hybrid(Complex omega_n_mhz,
                                            Complex omega_m_mhz, double g_mhz) {
  if (g_mhz < 0) {
    throw std::invalid_argument("two_mode_hybrid: g must be >= 0");
  }
  const Complex mean = 0.5 * (omega_n_mhz + omega_m_mhz);
  const Complex d = omega_n_mhz - omega_m_mhz;
  Complex r = 0.5 * std::sqrt(d * d + 4.0 * g_mhz * g_mhz);
  if (r.real() < 0) r = -r;  // principal branch: Re(plus) >= Re(minus)
  return {mean + r, mean - r};
}

double effective_coupling(const Spectrum& spectrum, int m, int s, double g0_mhz) {
  if (m < 1 || m > static_cast<int>(spectrum.modes.size())) {
    throw std::invalid_argument("effective_coupling: mode index out of range");
  }
  const EigenMode& mode = spectrum.modes[static_cast<size_t>(m - 1)];
  if (s < 1 || s > mode.amplitudes.size()) {
    throw std::invalid_argument("effective_coupling: site index out of range");
  }
  if (g0_mhz < 0) {
    throw std::invalid_argument("effective_coupling: g0 must be >= 0");
  }
  return g0_mhz * std::abs(mode.amplitudes(s - 1));
}

double edge_linewidth(const Spectrum& spectrum, int s) {
  std::vector<const EigenMode*> edge;
  for (const auto& mode : spectrum.modes) {
    if (mode.cls == ModeClass::edge) edge.push_back(&mode);
  }
  if (edge.size() != 2) {
    throw std::invalid_argument("edge_linewidth: expected exactly 2 edge modes, found " +
                                std::to_string(edge.size()));
  }
  if (edge.front()->amplitudes.size() < s || s < 1) {
    throw std::invalid_argument("edge_linewidth: site index out of range");
  }
  const double w1 = std::norm(edge[0]->amplitudes(s - 1));
  const double w2 = std::norm(edge[1]->amplitudes(s - 1));
  if (w1 + w2 <= 0) {
    throw std::runtime_error("edge_linewidth: both edge modes vanish at site " +
                             std::to_string(s));
  }
  return (edge[0]->loss_mhz * w1 + edge[1]->loss_mhz * w2) / (w1 + w2);
}

SweepResult anticrossing_sweep(const LatticeSpec& spec, const MagnonSpec& magnon,
                               const std::vector<double>& currents_a) {
  spec.validate();
  magnon.validate(spec.sites());
  if (currents_a.empty()) {
    throw std::invalid_argument("anticrossing_sweep: empty current grid");
  }
  for (size_t t = 1; t < currents_a.size(); ++t) {
    if (currents_a[t] <= currents_a[t - 1]) {
      throw std::invalid_argument("anticrossing_sweep: currents must be strictly ascending");
    }
  }
  if (currents_a.size() > 1 && magnon.c1_ghz_per_a == 0.0) {
    throw std::invalid_argument(
        "anticrossing_sweep: c1_ghz_per_a must be nonzero when sweeping current");
  }

  const ComplexMatrix chain = build_chain_hamiltonian(spec);
  const size_t n_pts = currents_a.size();
  const size_t n_modes = static_cast<size_t>(spec.sites()) + 1;

  std::vector<Spectrum> spectra(n_pts);
  parallel_for(n_pts, [&](size_t t) {
    spectra[t] = eigendecompose(
        build_coupled_hamiltonian(chain, magnon, magnon.omega_n_ghz(currents_a[t])));
  });

  SweepResult out;
  out.currents_a = currents_a;
  out.branches.assign(n_modes, std::vector<Complex>(n_pts));

  // Branch b starts as the b-th sorted mode of the first point; afterwards it
  // follows whichever new eigenvector overlaps its previous one the most
  // (greedy global assignment).
  std::vector<Eigen::VectorXcd> carried(n_modes);
  for (size_t b = 0; b < n_modes; ++b) {
    carried[b] = spectra[0].modes[b].amplitudes;
    out.branches[b][0] = spectra[0].modes[b].value_mhz();
  }

  // Warn about frequency maps that never reach the photonic band.
  {
    const double lo = magnon.omega_n_ghz(currents_a.front()) * 1e3;
    const double hi = magnon.omega_n_ghz(currents_a.back()) * 1e3;
    const double band = spec.v_mhz + spec.w_mhz;
    if (std::max(lo, hi) < spec.omega0_mhz() - band ||
        std::min(lo, hi) > spec.omega0_mhz() + band) {
      out.warnings.push_back("magnon frequency map never enters the chain band");
    }
  }

  for (size_t t = 1; t < n_pts; ++t) {
    const auto& modes = spectra[t].modes;
    Eigen::MatrixXd overlap(n_modes, n_modes);
    for (size_t b = 0; b < n_modes; ++b) {
      for (size_t j = 0; j < n_modes; ++j) {
        overlap(b, j) = std::abs(carried[b].dot(modes[j].amplitudes));
      }
    }
    std::vector<int> assignment(n_modes, -1);
    std::vector<bool> branch_done(n_modes, false), mode_done(n_modes, false);
    double weakest = 1.0;
    for (size_t pick = 0; pick < n_modes; ++pick) {
      double best = -1.0;
      size_t bb = 0, jj = 0;
      for (size_t b = 0; b < n_modes; ++b) {
        if (branch_done[b]) continue;
        for (size_t j = 0; j < n_modes; ++j) {
          if (mode_done[j]) continue;
          if (overlap(b, j) > best) {
            best = overlap(b, j);
            bb = b;
            jj = j;
          }
        }
      }
      assignment[bb] = static_cast<int>(jj);
      branch_done[bb] = true;
      mode_done[jj] = true;
      weakest = std::min(weakest, best);
    }
    if (weakest < 1.0 / std::sqrt(2.0)) {
      out.warnings.push_back("ambiguous branch assignment at current " +
                             format_double(currents_a[t]) + " A (overlap " +
                             format_double(weakest) + ")");
    }
    for (size_t b = 0; b < n_modes; ++b) {
      const auto& mode = modes[static_cast<size_t>(assignment[b])];
      out.branches[b][t] = mode.value_mhz();
      carried[b] = mode.amplitudes;
    }
  }
  return out;
}

std::string SweepResult::to_csv() const {
  std::string out;
  std::vector<std::string> fields = {"current_a", "branch", "re_ghz", "loss_mhz"};
  csv_row(out, fields.data(), 4);
  for (size_t t = 0; t < currents_a.size(); ++t) {
    for (size_t b = 0; b < branches.size(); ++b) {
      const Complex value = branches[b][t];
      fields = {format_double(currents_a[t]), format_int(static_cast<int>(b) + 1),
                format_double(value.real() * 1e-3), format_double(-value.imag())};
      csv_row(out, fields.data(), 4);
    }
  }
  return out;
}

std::string MagnonSpec::to_json() const {
  return detail::magnon_to_json(*this).dump(2);
}

MagnonSpec MagnonSpec::from_json(const std::string& text) {
  std::vector<std::string> errors;
  detail::json doc = detail::parse_document(text, errors);
  MagnonSpec magnon = detail::parse_magnon(doc, "magnon", errors);
  detail::throw_if_errors(errors, "invalid MagnonSpec document");
  return magnon;
}

namespace detail {

MagnonSpec parse_magnon(const json& obj, const std::string& context,
                        std::vector<std::string>& errors) {
  MagnonSpec magnon;
  if (!obj.is_object()) {
    errors.push_back(context + ": expected an object");
    return magnon;
  }
  check_keys(obj, kMagnonKeys, context, errors);
  magnon.site = static_cast<int>(get_int(obj, "site", context, errors, true, 1));
  magnon.g0_mhz = get_num(obj, "g0_mhz", context, errors, true);
  magnon.gamma_n_mhz = get_num(obj, "gamma_n_mhz", context, errors, true);
  magnon.c0_ghz = get_num(obj, "c0_ghz", context, errors, true);
  magnon.c1_ghz_per_a = get_num(obj, "c1_ghz_per_a", context, errors, false, 0.0);
  return magnon;
}

json magnon_to_json(const MagnonSpec& magnon) {
  json obj;
  obj["site"] = magnon.site;
  obj["g0_mhz"] = magnon.g0_mhz;
  obj["gamma_n_mhz"] = magnon.gamma_n_mhz;
  obj["c0_ghz"] = magnon.c0_ghz;
  obj["c1_ghz_per_a"] = magnon.c1_ghz_per_a;
  return obj;
}

}  // namespace detail

}  // namespace topolattice
