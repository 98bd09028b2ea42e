#include "topolattice/spectrum.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json_detail.hpp"
#include "topolattice/format.hpp"

namespace topolattice {

const char* to_string(ModeClass c) {
  return c == ModeClass::edge ? "edge" : "bulk";
}

const char* to_string(PtTag t) {
  switch (t) {
    case PtTag::unbroken:
      return "unbroken";
    case PtTag::broken_low_loss:
      return "broken-low-loss";
    default:
      return "broken-high-loss";
  }
}

Spectrum eigendecompose(const ComplexMatrix& h) {
  const Eigen::Index n = h.values.rows();
  if (n == 0 || h.values.cols() != n) {
    throw std::invalid_argument("eigendecompose: matrix must be square and non-empty");
  }

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(h.values, true);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigendecompose: QR iteration failed to converge for dimension " +
                             std::to_string(n));
  }

  const double h_norm = h.values.norm();
  const double residual_cap = 1e-8 * h_norm;

  struct Pair {
    Complex value;
    Eigen::VectorXcd vec;
  };
  std::vector<Pair> pairs(static_cast<size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXcd phi = solver.eigenvectors().col(j);
    phi /= phi.norm();
    const Complex lambda = solver.eigenvalues()(j);
    const double residual = (h.values * phi - lambda * phi).norm();
    if (residual > residual_cap) {
      throw std::runtime_error("eigendecompose: residual " + std::to_string(residual) +
                               " MHz exceeds tolerance for dimension " + std::to_string(n));
    }
    pairs[static_cast<size_t>(j)] = {lambda, std::move(phi)};
  }

  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });

  Spectrum out;
  out.modes.reserve(pairs.size());
  int m = 1;
  for (auto& p : pairs) {
    EigenMode mode;
    mode.m = m++;
    mode.re_ghz = (p.value.real() + h.ref_mhz) * 1e-3;
    mode.loss_mhz = -p.value.imag();
    mode.amplitudes = std::move(p.vec);
    out.modes.push_back(std::move(mode));
  }
  return out;
}

Spectrum spectrum_of(const LatticeSpec& spec) {
  Spectrum s = eigendecompose(build_chain_hamiltonian(spec));
  s.spec = spec;
  return classify_modes(std::move(s));
}

Eigen::VectorXd pdos(const EigenMode& mode) {
  return mode.amplitudes.cwiseAbs2();
}

Spectrum classify_modes(Spectrum spectrum) {
  if (!spectrum.spec) {
    throw std::invalid_argument("classify_modes: spectrum carries no lattice parameters");
  }
  const LatticeSpec& spec = *spectrum.spec;
  const double omega0 = spec.omega0_mhz();
  const double half_gap = std::abs(spec.w_mhz - spec.v_mhz) / 2.0;
  const double gamma_bar = spec.gamma_bar_mhz();
  const double loss_tol = 0.5;
  const double degen_tol = 1e-6 * (spec.v_mhz + spec.w_mhz);

  int edge_count = 0;
  for (auto& mode : spectrum.modes) {
    const double detuning = std::abs(mode.re_ghz * 1e3 - omega0);
    mode.cls = detuning < half_gap ? ModeClass::edge : ModeClass::bulk;
    if (mode.cls == ModeClass::edge) ++edge_count;

    if (std::abs(mode.loss_mhz - gamma_bar) <= loss_tol) {
      mode.pt_tag = PtTag::unbroken;
    } else if (mode.loss_mhz < gamma_bar) {
      mode.pt_tag = PtTag::broken_low_loss;
    } else {
      mode.pt_tag = PtTag::broken_high_loss;
    }
  }

  for (size_t i = 0; i < spectrum.modes.size(); ++i) {
    bool degenerate = false;
    const Complex vi = spectrum.modes[i].value_mhz();
    if (i > 0 && std::abs(vi - spectrum.modes[i - 1].value_mhz()) < degen_tol) {
      degenerate = true;
    }
    if (i + 1 < spectrum.modes.size() &&
        std::abs(vi - spectrum.modes[i + 1].value_mhz()) < degen_tol) {
      degenerate = true;
    }
    spectrum.modes[i].degenerate = degenerate;
  }

  if (spec.v_mhz < spec.w_mhz && edge_count != 2) {
    spectrum.warnings.push_back("expected 2 mid-gap modes for v < w, found " +
                                std::to_string(edge_count));
  }
  return spectrum;
}

std::vector<std::pair<double, double>> normalized_eigenvalues(const Spectrum& spectrum) {
  if (!spectrum.spec) {
    throw std::invalid_argument("normalized_eigenvalues: spectrum carries no lattice parameters");
  }
  const LatticeSpec& spec = *spectrum.spec;
  const double omega0 = spec.omega0_mhz();
  const double gamma_bar = spec.gamma_bar_mhz();
  const double scale = spec.v_mhz + spec.w_mhz;

  std::vector<std::pair<double, double>> out;
  out.reserve(spectrum.modes.size());
  for (const auto& mode : spectrum.modes) {
    out.emplace_back((mode.re_ghz * 1e3 - omega0) / scale,
                     (std::abs(-mode.loss_mhz) - gamma_bar) / scale);
  }
  return out;
}

double particle_hole_residual(const Spectrum& spectrum) {
  if (!spectrum.spec) {
    throw std::invalid_argument("particle_hole_residual: spectrum carries no lattice parameters");
  }
  const LatticeSpec& spec = *spectrum.spec;
  const double omega0 = spec.omega0_mhz();
  const double gamma_bar = spec.gamma_bar_mhz();

  std::vector<Complex> eps;
  eps.reserve(spectrum.modes.size());
  for (const auto& mode : spectrum.modes) {
    eps.push_back(mode.value_mhz() - omega0 + Complex{0.0, gamma_bar});
  }

  auto directed = [&](bool mirror_first) {
    double worst = 0.0;
    for (const Complex& a : eps) {
      const Complex target = mirror_first ? -std::conj(a) : a;
      double best = std::numeric_limits<double>::infinity();
      for (const Complex& b : eps) {
        const Complex other = mirror_first ? b : -std::conj(b);
        best = std::min(best, std::abs(target - other));
      }
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(true), directed(false));
}

std::string Spectrum::to_json() const {
  detail::json doc;
  doc["modes"] = detail::json::array();
  for (const auto& mode : modes) {
    detail::json entry;
    entry["m"] = mode.m;
    entry["re_ghz"] = mode.re_ghz;
    entry["loss_mhz"] = mode.loss_mhz;
    entry["class"] = to_string(mode.cls);
    entry["pt_tag"] = to_string(mode.pt_tag);
    Eigen::VectorXd weights = pdos(mode);
    detail::json site_weights = detail::json::array();
    for (Eigen::Index s = 0; s < weights.size(); ++s) {
      site_weights.push_back(weights(s));
    }
    entry["pdos"] = std::move(site_weights);
    doc["modes"].push_back(std::move(entry));
  }
  return doc.dump(2);
}

std::string Spectrum::to_csv() const {
  const Eigen::Index n_sites = modes.empty() ? 0 : modes.front().amplitudes.size();
  std::string out;
  std::vector<std::string> fields;
  fields.reserve(static_cast<size_t>(5 + n_sites));
  fields = {"m", "re_ghz", "loss_mhz", "class", "pt_tag"};
  for (Eigen::Index s = 1; s <= n_sites; ++s) {
    fields.push_back("s" + std::to_string(s));
  }
  csv_row(out, fields.data(), static_cast<int>(fields.size()));

  for (const auto& mode : modes) {
    fields.clear();
    fields.push_back(format_int(mode.m));
    fields.push_back(format_double(mode.re_ghz));
    fields.push_back(format_double(mode.loss_mhz));
    fields.push_back(to_string(mode.cls));
    fields.push_back(to_string(mode.pt_tag));
    Eigen::VectorXd weights = pdos(mode);
    for (Eigen::Index s = 0; s < weights.size(); ++s) {
      fields.push_back(format_double(weights(s)));
    }
    csv_row(out, fields.data(), static_cast<int>(fields.size()));
  }
  return out;
}

}  // namespace topolattice
