#include "topolattice/lattice.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "json_detail.hpp"

namespace topolattice {

namespace {
constexpr Complex kI{0.0, 1.0};

const std::vector<std::string> kLatticeKeys = {
    "n_cells", "omega0_ghz",       "gamma_a_mhz", "gamma_b_mhz",
    "v_mhz",   "hopping_imag_mhz", "w_mhz"};
}  // namespace

void LatticeSpec::validate() const {
  std::vector<std::string> errors;
  if (n_cells < 1) errors.push_back("n_cells must be >= 1");
  if (v_mhz < 0) errors.push_back("v_mhz must be >= 0");
  if (w_mhz < 0) errors.push_back("w_mhz must be >= 0");
  if (gamma_a_mhz < 0) errors.push_back("gamma_a_mhz must be >= 0");
  if (gamma_b_mhz < 0) errors.push_back("gamma_b_mhz must be >= 0");
  if (!std::isfinite(omega0_ghz)) errors.push_back("omega0_ghz must be finite");
  if (!std::isfinite(hopping_imag_mhz))
    errors.push_back("hopping_imag_mhz must be finite");
  detail::throw_if_errors(errors, "invalid LatticeSpec");
}

ComplexMatrix build_chain_hamiltonian(const LatticeSpec& spec) {
  spec.validate();
  const int n = spec.sites();
  ComplexMatrix h;
  h.values = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    // 0-based row i is 1-based site s = i + 1; odd sites carry gamma_a.
    const double gamma = (i % 2 == 0) ? spec.gamma_a_mhz : spec.gamma_b_mhz;
    h.values(i, i) = spec.omega0_mhz() - kI * gamma;
  }
  for (int i = 0; i + 1 < n; ++i) {
    const double hop = (i % 2 == 0) ? spec.v_mhz : spec.w_mhz;
    const Complex t = hop - kI * spec.hopping_imag_mhz;
    h.values(i, i + 1) = t;
    h.values(i + 1, i) = t;
  }
  return h;
}

Complex bloch_offdiagonal(const LatticeSpec& spec, double k) {
  const Complex tv = spec.v_mhz - kI * spec.hopping_imag_mhz;
  const Complex tw = spec.w_mhz - kI * spec.hopping_imag_mhz;
  return tv + tw * std::exp(-kI * k);
}

ComplexMatrix bloch_hamiltonian(const LatticeSpec& spec, double k) {
  spec.validate();
  ComplexMatrix h;
  h.values = Eigen::MatrixXcd(2, 2);
  h.values(0, 0) = spec.omega0_mhz() - kI * spec.gamma_a_mhz;
  h.values(1, 1) = spec.omega0_mhz() - kI * spec.gamma_b_mhz;
  h.values(0, 1) = bloch_offdiagonal(spec, k);
  h.values(1, 0) = bloch_offdiagonal(spec, -k);
  return h;
}

std::pair<Complex, Complex> bulk_bands(const LatticeSpec& spec, double k) {
  spec.validate();
  const Complex center =
      spec.omega0_mhz() - kI * spec.gamma_bar_mhz();
  const double half_contrast = 0.5 * spec.delta_gamma_mhz();
  const Complex radicand =
      bloch_offdiagonal(spec, k) * bloch_offdiagonal(spec, -k) -
      half_contrast * half_contrast;
  const Complex root = std::sqrt(radicand);
  return {center + root, center - root};
}

LatticeSpec with_delta_gamma(const LatticeSpec& spec, double delta_gamma_mhz) {
  if (delta_gamma_mhz < 0)
    throw std::invalid_argument("delta_gamma must be >= 0");
  LatticeSpec out = spec;
  // Keep the sweep passive: raise the mean loss when the requested contrast
  // would push gamma_a below zero. Eigenvalues shift uniformly by -i*c under
  // a mean-loss change, so thresholds, splittings and normalized eigenvalues
  // are unaffected.
  const double bar = std::max(spec.gamma_bar_mhz(), 0.5 * delta_gamma_mhz);
  out.gamma_a_mhz = bar - 0.5 * delta_gamma_mhz;
  out.gamma_b_mhz = bar + 0.5 * delta_gamma_mhz;
  return out;
}

std::string LatticeSpec::to_json() const {
  return detail::lattice_to_json(*this).dump(2);
}

namespace detail {

json lattice_to_json(const LatticeSpec& spec) {
  json j;
  j["n_cells"] = spec.n_cells;
  j["omega0_ghz"] = spec.omega0_ghz;
  j["gamma_a_mhz"] = spec.gamma_a_mhz;
  j["gamma_b_mhz"] = spec.gamma_b_mhz;
  j["v_mhz"] = spec.v_mhz;
  j["w_mhz"] = spec.w_mhz;
  j["hopping_imag_mhz"] = spec.hopping_imag_mhz;
  return j;
}

LatticeSpec parse_lattice(const json& obj, const std::string& context,
                          std::vector<std::string>& errors) {
  LatticeSpec spec;
  if (!obj.is_object()) {
    errors.push_back(context + ": expected an object");
    return spec;
  }
  check_keys(obj, kLatticeKeys, context, errors);
  spec.n_cells =
      static_cast<int>(get_int(obj, "n_cells", context, errors, true, 1));
  spec.omega0_ghz = get_num(obj, "omega0_ghz", context, errors, true);
  spec.gamma_a_mhz = get_num(obj, "gamma_a_mhz", context, errors, true);
  spec.gamma_b_mhz = get_num(obj, "gamma_b_mhz", context, errors, true);
  spec.v_mhz = get_num(obj, "v_mhz", context, errors, true);
  spec.w_mhz = get_num(obj, "w_mhz", context, errors, true);
  spec.hopping_imag_mhz =
      get_num(obj, "hopping_imag_mhz", context, errors, false, 0.0);
  if (errors.empty()) {
    try {
      spec.validate();
    } catch (const std::invalid_argument& e) {
      errors.push_back(std::string(e.what()));
    }
  }
  return spec;
}

}  // namespace detail

LatticeSpec LatticeSpec::from_json(const std::string& text) {
  std::vector<std::string> errors;
  detail::json doc = detail::parse_document(text, errors);
  LatticeSpec spec;
  if (errors.empty()) spec = detail::parse_lattice(doc, "lattice", errors);
  detail::throw_if_errors(errors, "cannot parse LatticeSpec");
  return spec;
}

}  // namespace topolattice
