#include "topolattice/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <utility>

#include "json_detail.hpp"
#include "topolattice/fitting.hpp"
#include "topolattice/format.hpp"
#include "topolattice/parallel.hpp"
#include "topolattice/spectrum.hpp"
#include "topolattice/topology.hpp"

namespace topolattice {

namespace {

struct Artifact {
  std::string filename;
  std::string content;
  long rows = 0;
  std::string summary;
};

std::vector<Artifact> run_spectrum(const ExperimentConfig& config) {
  const Spectrum s = spectrum_of(config.lattice);
  int edge_count = 0;
  for (const auto& mode : s.modes) {
    if (mode.cls == ModeClass::edge) ++edge_count;
  }
  const long rows = static_cast<long>(s.modes.size());
  const std::string summary = format_int(rows) + " modes, " +
                              format_int(edge_count) + " edge";
  return {{config.output_prefix + "_spectrum.json", s.to_json(), rows, summary},
          {config.output_prefix + "_spectrum.csv", s.to_csv(), rows, summary}};
}

std::vector<Artifact> run_winding(const ExperimentConfig& config) {
  const int w_h = winding_hermitian(config.lattice);
  detail::json doc;
  doc["w_h"] = w_h;
  std::string summary = "W_h=" + format_int(w_h);
  try {
    const int w_nh = winding_generalized(config.lattice);
    doc["w_nh"] = w_nh;
    summary += ", W_nh=" + format_int(w_nh);
  } catch (const std::domain_error&) {
    doc["w_nh"] = nullptr;
    summary += ", W_nh undefined (PT-broken bulk)";
  }
  return {{config.output_prefix + "_winding.json", doc.dump(2), 1, summary}};
}

std::vector<Artifact> run_ep_scan(const ExperimentConfig& config) {
  const std::vector<EpReport> reports =
      ep_scan(config.lattice, config.delta_gammas_mhz->points());
  std::string summary = "no EPs in range";
  if (!reports.empty()) {
    const EpReport& first = reports.front();
    summary = "first EP at delta_gamma=" + format_double(first.delta_gamma_c_mhz) +
              " MHz (normalized " + format_double(first.normalized) + ", " +
              to_string(first.kind) + "), " + format_int((long)reports.size()) +
              " total";
  }
  return {{config.output_prefix + "_ep_scan.csv", ep_csv(reports),
           static_cast<long>(reports.size()), summary}};
}

std::vector<Artifact> run_threshold(const ExperimentConfig& config) {
  const ThresholdScaling scaling =
      threshold_vs_length(config.lattice, config.n_values);
  std::string summary;
  if (std::isfinite(scaling.slope)) {
    summary = "slope=" + format_double(scaling.slope) +
              ", R^2=" + format_double(scaling.r_squared);
  } else {
    summary = "single point, no regression";
  }
  return {{config.output_prefix + "_threshold_scaling.csv", scaling.to_csv(),
           static_cast<long>(scaling.points.size()), summary}};
}

std::vector<Artifact> run_map(const ExperimentConfig& config) {
  const TransmissionMap map =
      transmission_map(config.lattice, *config.magnon, *config.ports,
                       config.currents_a->points(), config.omegas_ghz->points());
  const long rows =
      static_cast<long>(map.currents_a.size() * map.omegas_ghz.size());
  const std::string summary = format_int((long)map.currents_a.size()) + "x" +
                              format_int((long)map.omegas_ghz.size()) +
                              " grid, peak |S21|^2=" +
                              format_double(map.s21_sq.maxCoeff());
  return {{config.output_prefix + "_map.csv", map.to_csv(), rows, summary},
          {config.output_prefix + "_map_header.json", map.header_json(), 1,
           summary}};
}

std::vector<Artifact> run_absorptivity(const ExperimentConfig& config) {
  const std::vector<double> omegas = config.omegas_ghz->points();
  std::vector<double> s21(omegas.size()), a1(omegas.size()), a2(omegas.size());
  parallel_for(omegas.size(), [&](size_t i) {
    const Eigen::Matrix2cd s = s_matrix(config.lattice, *config.ports, omegas[i]);
    s21[i] = std::norm(s(1, 0));
    a1[i] = absorptivity(s, 1);
    a2[i] = absorptivity(s, 2);
  });

  std::string csv;
  std::vector<std::string> fields = {"omega_ghz", "s21_sq", "a1", "a2"};
  csv_row(csv, fields.data(), 4);
  double max_a1 = 0.0, at = omegas.front();
  for (size_t i = 0; i < omegas.size(); ++i) {
    if (a1[i] > max_a1) {
      max_a1 = a1[i];
      at = omegas[i];
    }
    fields = {format_double(omegas[i]), format_double(s21[i]),
              format_double(a1[i]), format_double(a2[i])};
    csv_row(csv, fields.data(), 4);
  }
  const std::string summary = "max A1=" + format_double(max_a1) + " at " +
                              format_double(at) + " GHz";
  return {{config.output_prefix + "_absorptivity.csv", std::move(csv),
           static_cast<long>(omegas.size()), summary}};
}

std::vector<Artifact> run_fit(const ExperimentConfig& config) {
  const TransmissionMap map =
      transmission_map(config.lattice, *config.magnon, *config.ports,
                       config.currents_a->points(), config.omegas_ghz->points());

  // Branch samples: the two tallest peaks per frequency cut, lower first.
  // Cuts with fewer than two resolvable peaks do not constrain the repulsion
  // and are skipped; the probe window is expected to isolate one anticrossing.
  std::vector<BranchPoint> lower, upper;
  std::vector<double> lower_hwhm, upper_hwhm;
  for (size_t t = 0; t < map.currents_a.size(); ++t) {
    std::vector<double> cut(map.omegas_ghz.size());
    for (size_t c = 0; c < cut.size(); ++c) {
      cut[c] = map.s21_sq(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c));
    }
    std::vector<Peak> peaks = find_peaks(map.omegas_ghz, cut);
    if (peaks.size() < 2) continue;
    std::sort(peaks.begin(), peaks.end(),
              [](const Peak& a, const Peak& b) { return a.height > b.height; });
    peaks.resize(2);
    if (peaks[0].center_ghz > peaks[1].center_ghz) std::swap(peaks[0], peaks[1]);
    lower.push_back({map.currents_a[t], peaks[0].center_ghz});
    upper.push_back({map.currents_a[t], peaks[1].center_ghz});
    lower_hwhm.push_back(peaks[0].fwhm_mhz / 2.0);
    upper_hwhm.push_back(peaks[1].fwhm_mhz / 2.0);
  }

  const FitResult fit = fit_level_repulsion(lower, upper, *config.magnon);

  std::string csv;
  std::vector<std::string> fields = {"current_a", "branch", "re_ghz", "loss_mhz"};
  csv_row(csv, fields.data(), 4);
  for (size_t i = 0; i < lower.size(); ++i) {
    fields = {format_double(lower[i].current_a), "1",
              format_double(lower[i].omega_ghz), format_double(lower_hwhm[i])};
    csv_row(csv, fields.data(), 4);
    fields = {format_double(upper[i].current_a), "2",
              format_double(upper[i].omega_ghz), format_double(upper_hwhm[i])};
    csv_row(csv, fields.data(), 4);
  }

  std::string summary = "g=" + format_double(fit.g_mhz) + " MHz, " +
                        (fit.converged ? "converged" : "not converged");
  for (const auto& w : fit.warnings) summary += "; " + w;
  return {{config.output_prefix + "_fit.json", fit.to_json(), 1, summary},
          {config.output_prefix + "_branches.csv", std::move(csv),
           static_cast<long>(2 * lower.size()), summary}};
}

}  // namespace

std::vector<ArtifactInfo> run(const ExperimentConfig& config,
                              const std::string& out_dir) {
  std::vector<Artifact> artifacts;
  try {
    switch (config.task) {
      case Task::spectrum:
        artifacts = run_spectrum(config);
        break;
      case Task::winding:
        artifacts = run_winding(config);
        break;
      case Task::ep_scan:
        artifacts = run_ep_scan(config);
        break;
      case Task::threshold_scaling:
        artifacts = run_threshold(config);
        break;
      case Task::map:
        artifacts = run_map(config);
        break;
      case Task::absorptivity:
        artifacts = run_absorptivity(config);
        break;
      case Task::fit:
        artifacts = run_fit(config);
        break;
    }
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("task '") + to_string(config.task) +
                             "': " + e.what());
  }

  namespace fs = std::filesystem;
  const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec && !fs::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory '" + dir.string() +
                             "': " + ec.message());
  }

  std::vector<ArtifactInfo> infos;
  std::vector<fs::path> written;
  try {
    for (const auto& artifact : artifacts) {
      const fs::path path = dir / artifact.filename;
      {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) {
          throw std::runtime_error("cannot open '" + path.string() + "' for writing");
        }
        out.write(artifact.content.data(),
                  static_cast<std::streamsize>(artifact.content.size()));
        if (!out) {
          throw std::runtime_error("write failed for '" + path.string() + "'");
        }
      }
      written.push_back(path);
      infos.push_back({path.string(), artifact.rows, artifact.summary});
    }
  } catch (...) {
    for (const auto& path : written) {
      std::error_code ignore;
      fs::remove(path, ignore);
    }
    throw;
  }
  return infos;
}

}  // namespace topolattice
