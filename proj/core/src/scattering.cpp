#include "topolattice/scattering.hpp"

#include <Eigen/LU>

#include <cmath>
#include <stdexcept>

#include "json_detail.hpp"
#include "topolattice/format.hpp"
#include "topolattice/parallel.hpp"

namespace topolattice {

namespace {

constexpr Complex kI{0.0, 1.0};

const std::vector<std::string> kPortKeys = {"port1_site", "port2_site",
                                            "kappa1_mhz", "kappa2_mhz"};

void check_port_range(const PortConfig& ports, Eigen::Index n) {
  if (ports.port1_site < 1 || ports.port1_site > n || ports.port2_site < 1 ||
      ports.port2_site > n) {
    throw std::invalid_argument("ports: site out of range 1.." + std::to_string(n));
  }
  if (ports.kappa1_mhz < 0 || ports.kappa2_mhz < 0) {
    throw std::invalid_argument("ports: couplings must be >= 0");
  }
}

// Columns of (omega*I - H_eff)^(-1) at the two port sites, with a residual
// guard against a (near-)singular resolvent.
Eigen::MatrixXcd port_resolvent(const Eigen::MatrixXcd& h_eff, double omega_mhz,
                                Eigen::Index p1, Eigen::Index p2) {
  const Eigen::Index n = h_eff.rows();
  Eigen::MatrixXcd a = -h_eff;
  a.diagonal().array() += omega_mhz;
  Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(n, 2);
  rhs(p1, 0) = 1.0;
  rhs(p2, 1) = 1.0;
  Eigen::MatrixXcd g = a.partialPivLu().solve(rhs);
  const double scale = std::max(1.0, a.norm());
  if (!g.allFinite() || (a * g - rhs).norm() > 1e-8 * scale * g.norm()) {
    throw std::runtime_error("s_matrix: resolvent is singular at omega = " +
                             format_double(omega_mhz * 1e-3) + " GHz");
  }
  return g;
}

Eigen::Matrix2cd s_from_resolvent(const Eigen::MatrixXcd& g, const PortConfig& ports,
                                  Eigen::Index p1, Eigen::Index p2) {
  const double k1 = ports.kappa1_mhz;
  const double k2 = ports.kappa2_mhz;
  Eigen::Matrix2cd s;
  s(0, 0) = 1.0 - 2.0 * kI * k1 * g(p1, 0);
  s(1, 0) = -2.0 * kI * std::sqrt(k1 * k2) * g(p2, 0);
  s(0, 1) = -2.0 * kI * std::sqrt(k1 * k2) * g(p1, 1);
  s(1, 1) = 1.0 - 2.0 * kI * k2 * g(p2, 1);
  return s;
}

}  // namespace

PortConfig PortConfig::resolved(int n_sites) const {
  PortConfig out = *this;
  if (out.port2_site == 0) out.port2_site = n_sites;
  return out;
}

void PortConfig::validate(int n_sites) const {
  const PortConfig r = resolved(n_sites);
  std::vector<std::string> errors;
  if (r.port1_site < 1 || r.port1_site > n_sites) {
    errors.push_back("port1_site must lie in 1.." + std::to_string(n_sites));
  }
  if (r.port2_site < 1 || r.port2_site > n_sites) {
    errors.push_back("port2_site must lie in 1.." + std::to_string(n_sites));
  }
  if (r.port1_site == r.port2_site) {
    errors.push_back("port sites must be distinct");
  }
  if (r.kappa1_mhz < 0) errors.push_back("kappa1_mhz must be >= 0");
  if (r.kappa2_mhz < 0) errors.push_back("kappa2_mhz must be >= 0");
  detail::throw_if_errors(errors, "invalid PortConfig");
}

ComplexMatrix effective_hamiltonian(const ComplexMatrix& h, const PortConfig& ports) {
  const Eigen::Index n = h.values.rows();
  const PortConfig r = ports.resolved(static_cast<int>(n));
  check_port_range(r, n);
  ComplexMatrix out = h;
  out.values(r.port1_site - 1, r.port1_site - 1) -= kI * r.kappa1_mhz;
  out.values(r.port2_site - 1, r.port2_site - 1) -= kI * r.kappa2_mhz;
  return out;
}

Eigen::Matrix2cd s_matrix(const ComplexMatrix& h, const PortConfig& ports,
                          double omega_ghz) {
  const Eigen::Index n = h.values.rows();
  const PortConfig r = ports.resolved(static_cast<int>(n));
  check_port_range(r, n);
  const ComplexMatrix h_eff = effective_hamiltonian(h, r);
  const Eigen::Index p1 = r.port1_site - 1;
  const Eigen::Index p2 = r.port2_site - 1;
  const double omega_mhz = omega_ghz * 1e3 - h.ref_mhz;
  return s_from_resolvent(port_resolvent(h_eff.values, omega_mhz, p1, p2), r, p1, p2);
}

Eigen::Matrix2cd s_matrix(const LatticeSpec& spec, const PortConfig& ports,
                          double omega_ghz) {
  ports.validate(spec.sites());
  return s_matrix(build_chain_hamiltonian(spec), ports, omega_ghz);
}

double absorptivity(const Eigen::Matrix2cd& s, int input_port) {
  if (input_port != 1 && input_port != 2) {
    throw std::invalid_argument("absorptivity: input_port must be 1 or 2");
  }
  const int c = input_port - 1;
  return 1.0 - std::norm(s(c, c)) - std::norm(s(1 - c, c));
}

double absorptivity(const LatticeSpec& spec, const PortConfig& ports,
                    double omega_ghz, int input_port) {
  return absorptivity(s_matrix(spec, ports, omega_ghz), input_port);
}

TransmissionMap transmission_map(const LatticeSpec& spec, const MagnonSpec& magnon,
                                 const PortConfig& ports,
                                 const std::vector<double>& currents_a,
                                 const std::vector<double>& omegas_ghz) {
  spec.validate();
  magnon.validate(spec.sites());
  ports.validate(spec.sites());
  if (currents_a.empty() || omegas_ghz.empty()) {
    throw std::invalid_argument("transmission_map: grids must be nonempty");
  }

  TransmissionMap map;
  map.currents_a = currents_a;
  map.omegas_ghz = omegas_ghz;
  map.lattice = spec;
  map.magnon = magnon;
  map.ports = ports.resolved(spec.sites());

  const Eigen::Index rows = static_cast<Eigen::Index>(currents_a.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(omegas_ghz.size());
  map.s21_sq.resize(rows, cols);
  map.a1.resize(rows, cols);
  map.a2.resize(rows, cols);

  const ComplexMatrix chain = build_chain_hamiltonian(spec);
  const PortConfig r = map.ports;
  const Eigen::Index p1 = r.port1_site - 1;
  const Eigen::Index p2 = r.port2_site - 1;

  parallel_for(currents_a.size(), [&](size_t t) {
    const ComplexMatrix h_eff = effective_hamiltonian(
        build_coupled_hamiltonian(chain, magnon, magnon.omega_n_ghz(currents_a[t])),
        r);
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double omega_ghz = omegas_ghz[static_cast<size_t>(c)];
      try {
        const Eigen::MatrixXcd g =
            port_resolvent(h_eff.values, omega_ghz * 1e3 - h_eff.ref_mhz, p1, p2);
        const Eigen::Matrix2cd s = s_from_resolvent(g, r, p1, p2);
        map.s21_sq(static_cast<Eigen::Index>(t), c) = std::norm(s(1, 0));
        map.a1(static_cast<Eigen::Index>(t), c) = absorptivity(s, 1);
        map.a2(static_cast<Eigen::Index>(t), c) = absorptivity(s, 2);
      } catch (const std::exception& e) {
        throw std::runtime_error("transmission_map: current " +
                                 format_double(currents_a[t]) + " A, omega " +
                                 format_double(omega_ghz) + " GHz: " + e.what());
      }
    }
  });
  return map;
}

std::string TransmissionMap::to_csv() const {
  std::string out;
  std::vector<std::string> fields = {"current_a", "omega_ghz", "s21_sq", "a1", "a2"};
  csv_row(out, fields.data(), 5);
  for (Eigen::Index t = 0; t < s21_sq.rows(); ++t) {
    for (Eigen::Index c = 0; c < s21_sq.cols(); ++c) {
      fields = {format_double(currents_a[static_cast<size_t>(t)]),
                format_double(omegas_ghz[static_cast<size_t>(c)]),
                format_double(s21_sq(t, c)), format_double(a1(t, c)),
                format_double(a2(t, c))};
      csv_row(out, fields.data(), 5);
    }
  }
  return out;
}

std::string TransmissionMap::header_json() const {
  detail::json doc;
  doc["lattice"] = detail::lattice_to_json(lattice);
  doc["magnon"] = detail::magnon_to_json(magnon);
  doc["ports"] = detail::ports_to_json(ports);
  doc["currents_a"] = currents_a;
  doc["omegas_ghz"] = omegas_ghz;
  doc["rows"] = currents_a.size();
  doc["cols"] = omegas_ghz.size();
  return doc.dump(2);
}

TransmissionMap TransmissionMap::from_header_json(const std::string& text) {
  std::vector<std::string> errors;
  detail::json doc = detail::parse_document(text, errors);
  detail::check_keys(doc,
                     {"lattice", "magnon", "ports", "currents_a", "omegas_ghz",
                      "rows", "cols"},
                     "map header", errors);
  TransmissionMap map;
  if (doc.contains("lattice")) {
    map.lattice = detail::parse_lattice(doc["lattice"], "lattice", errors);
  } else {
    errors.push_back("map header: missing 'lattice'");
  }
  if (doc.contains("magnon")) {
    map.magnon = detail::parse_magnon(doc["magnon"], "magnon", errors);
  } else {
    errors.push_back("map header: missing 'magnon'");
  }
  if (doc.contains("ports")) {
    map.ports = detail::parse_ports(doc["ports"], "ports", errors);
  } else {
    errors.push_back("map header: missing 'ports'");
  }
  for (const char* key : {"currents_a", "omegas_ghz"}) {
    if (!doc.contains(key) || !doc[key].is_array()) {
      errors.push_back(std::string("map header: '") + key + "' must be an array");
      continue;
    }
    std::vector<double> values;
    for (const auto& v : doc[key]) {
      if (!v.is_number()) {
        errors.push_back(std::string("map header: '") + key +
                         "' must contain numbers only");
        break;
      }
      values.push_back(v.get<double>());
    }
    (std::string(key) == "currents_a" ? map.currents_a : map.omegas_ghz) =
        std::move(values);
  }
  if (doc.contains("rows") && doc["rows"].is_number_unsigned() &&
      doc["rows"].get<size_t>() != map.currents_a.size()) {
    errors.push_back("map header: 'rows' disagrees with currents_a length");
  }
  if (doc.contains("cols") && doc["cols"].is_number_unsigned() &&
      doc["cols"].get<size_t>() != map.omegas_ghz.size()) {
    errors.push_back("map header: 'cols' disagrees with omegas_ghz length");
  }
  detail::throw_if_errors(errors, "invalid TransmissionMap header");
  return map;
}

std::string PortConfig::to_json() const {
  return detail::ports_to_json(*this).dump(2);
}

PortConfig PortConfig::from_json(const std::string& text) {
  std::vector<std::string> errors;
  detail::json doc = detail::parse_document(text, errors);
  PortConfig ports = detail::parse_ports(doc, "ports", errors);
  detail::throw_if_errors(errors, "invalid PortConfig document");
  return ports;
}

namespace detail {

PortConfig parse_ports(const json& obj, const std::string& context,
                       std::vector<std::string>& errors) {
  PortConfig ports;
  if (!obj.is_object()) {
    errors.push_back(context + ": expected an object");
    return ports;
  }
  check_keys(obj, kPortKeys, context, errors);
  ports.port1_site =
      static_cast<int>(get_int(obj, "port1_site", context, errors, false, 1));
  ports.port2_site =
      static_cast<int>(get_int(obj, "port2_site", context, errors, false, 0));
  ports.kappa1_mhz = get_num(obj, "kappa1_mhz", context, errors, true);
  ports.kappa2_mhz = get_num(obj, "kappa2_mhz", context, errors, true);
  return ports;
}

json ports_to_json(const PortConfig& ports) {
  json obj;
  obj["port1_site"] = ports.port1_site;
  obj["port2_site"] = ports.port2_site;
  obj["kappa1_mhz"] = ports.kappa1_mhz;
  obj["kappa2_mhz"] = ports.kappa2_mhz;
  return obj;
}

}  // namespace detail

}  // namespace topolattice
