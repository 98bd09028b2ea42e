#include <algorithm>
#include <cmath>
#include <complex>
#include <set>
#include <sstream>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "support.hpp"
#include "topolattice/spectrum.hpp"

using namespace topolattice;
using testsupport::contains;
using testsupport::hermitian_chain;
using testsupport::lossy_chain;

namespace {

std::vector<const EigenMode*> edge_modes(const Spectrum& s) {
  std::vector<const EigenMode*> out;
  for (const auto& mode : s.modes) {
    if (mode.cls == ModeClass::edge) out.push_back(&mode);
  }
  return out;
}

}  // namespace

TEST_CASE("lossy chain spectrum: mid-gap pair trades real splitting for loss") {
  const Spectrum s = spectrum_of(lossy_chain());
  REQUIRE(s.modes.size() == 12);
  CHECK(s.warnings.empty());

  // Sorted ascending by real part, 1-based indices.
  for (size_t i = 0; i < s.modes.size(); ++i) {
    CHECK(s.modes[i].m == static_cast<int>(i) + 1);
    if (i > 0) CHECK(s.modes[i].re_ghz >= s.modes[i - 1].re_ghz);
  }

  const auto edges = edge_modes(s);
  REQUIRE(edges.size() == 2);
  // Real parts pinned to the chain center; losses split about gamma_bar.
  for (const EigenMode* mode : edges) {
    CHECK(std::abs(mode->re_ghz - 5.48) < 1e-9);
  }
  std::vector<double> losses = {edges[0]->loss_mhz, edges[1]->loss_mhz};
  std::sort(losses.begin(), losses.end());
  CHECK(losses[0] == doctest::Approx(40.4170353).epsilon(1e-6));
  CHECK(losses[1] == doctest::Approx(68.5829647).epsilon(1e-6));
  CHECK(losses[0] + losses[1] == doctest::Approx(2 * 54.5).epsilon(1e-9));

  // Bulk modes keep the mean loss exactly (PT unbroken).
  for (const auto& mode : s.modes) {
    if (mode.cls == ModeClass::bulk) {
      CHECK(std::abs(mode.loss_mhz - 54.5) < 1e-8);
      CHECK(mode.pt_tag == PtTag::unbroken);
    }
  }
  std::set<PtTag> edge_tags = {edges[0]->pt_tag, edges[1]->pt_tag};
  CHECK(edge_tags ==
        std::set<PtTag>{PtTag::broken_low_loss, PtTag::broken_high_loss});
}

TEST_CASE("lossy chain spectrum matches the band edges") {
  const Spectrum s = spectrum_of(lossy_chain());
  // Outermost modes approach omega0 +- (v + w) from inside.
  CHECK(s.modes.front().re_ghz == doctest::Approx(4.95181674).epsilon(1e-7));
  CHECK(s.modes.back().re_ghz == doctest::Approx(6.00818326).epsilon(1e-7));
}

TEST_CASE("hermitian chain spectrum agrees with a self-adjoint oracle") {
  const LatticeSpec spec = hermitian_chain();
  const Spectrum s = spectrum_of(spec);
  REQUIRE(s.modes.size() == 12);

  // Independent oracle: real symmetric hopping matrix, uniform loss ignored.
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(12, 12);
  for (int i = 0; i + 1 < 12; ++i) {
    h(i, i + 1) = h(i + 1, i) = (i % 2 == 0) ? spec.v_mhz : spec.w_mhz;
  }
  h.diagonal().setConstant(spec.omega0_mhz());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  REQUIRE(solver.info() == Eigen::Success);

  for (int i = 0; i < 12; ++i) {
    CHECK(s.modes[static_cast<size_t>(i)].re_ghz * 1e3 ==
          doctest::Approx(solver.eigenvalues()(i)).epsilon(1e-12));
    CHECK(s.modes[static_cast<size_t>(i)].loss_mhz ==
          doctest::Approx(24.42).epsilon(1e-10));
    CHECK(s.modes[static_cast<size_t>(i)].pt_tag == PtTag::unbroken);
  }
}

TEST_CASE("hermitian edge doublet: symmetric splitting, boundary weight") {
  const Spectrum s = spectrum_of(hermitian_chain());
  const auto edges = edge_modes(s);
  REQUIRE(edges.size() == 2);
  const double split_lo = 5620.0 - edges[0]->re_ghz * 1e3;
  const double split_hi = edges[1]->re_ghz * 1e3 - 5620.0;
  CHECK(split_lo == doctest::Approx(13.52).epsilon(2e-3));
  CHECK(split_hi == doctest::Approx(split_lo).epsilon(1e-9));
  for (const EigenMode* mode : edges) {
    const Eigen::VectorXd weights = pdos(*mode);
    CHECK(weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::sqrt(weights(0)) == doctest::Approx(0.552457).epsilon(1e-4));
    // Exponential decay into the chain, cell over cell.
    CHECK(weights(2) / weights(0) ==
          doctest::Approx(0.40).epsilon(0.03));
  }
}

TEST_CASE("amplitudes are unit norm and pdos matches them") {
  const Spectrum s = spectrum_of(lossy_chain());
  for (const auto& mode : s.modes) {
    CHECK(mode.amplitudes.norm() == doctest::Approx(1.0).epsilon(1e-12));
    const Eigen::VectorXd weights = pdos(mode);
    for (int i = 0; i < weights.size(); ++i) {
      CHECK(weights(i) == doctest::Approx(std::norm(mode.amplitudes(i)))
                              .epsilon(1e-12));
    }
  }
}

TEST_CASE("particle-hole symmetry of the spectrum") {
  CHECK(particle_hole_residual(spectrum_of(lossy_chain())) < 1e-6);
  CHECK(particle_hole_residual(spectrum_of(hermitian_chain())) < 1e-6);
}

TEST_CASE("uniform loss shift moves every eigenvalue by -ic") {
  const LatticeSpec base = lossy_chain();
  LatticeSpec shifted = base;
  const double c = 17.25;
  shifted.gamma_a_mhz += c;
  shifted.gamma_b_mhz += c;
  const Spectrum s0 = spectrum_of(base);
  const Spectrum s1 = spectrum_of(shifted);
  REQUIRE(s0.modes.size() == s1.modes.size());
  for (size_t i = 0; i < s0.modes.size(); ++i) {
    CHECK(std::abs(s1.modes[i].re_ghz - s0.modes[i].re_ghz) * 1e3 < 1e-9);
    CHECK(std::abs(s1.modes[i].loss_mhz - (s0.modes[i].loss_mhz + c)) < 1e-9);
    // Mode content is untouched by the shift.
    CHECK(std::abs(std::abs(s1.modes[i].amplitudes.dot(s0.modes[i].amplitudes)) -
                   1.0) < 1e-9);
  }
}

TEST_CASE("normalized eigenvalues collapse onto the contrast-free scale") {
  const Spectrum s = spectrum_of(lossy_chain());
  const auto beta = normalized_eigenvalues(s);
  REQUIRE(beta.size() == 12);
  const double scale = 208.5 + 335.5;
  for (size_t i = 0; i < beta.size(); ++i) {
    CHECK(beta[i].first ==
          doctest::Approx((s.modes[i].re_ghz * 1e3 - 5480.0) / scale)
              .epsilon(1e-12));
    CHECK(beta[i].second ==
          doctest::Approx((s.modes[i].loss_mhz - 54.5) / scale)
              .epsilon(1e-12));
  }
}

TEST_CASE("near-degenerate doublet is flagged") {
  LatticeSpec spec = hermitian_chain();
  spec.n_cells = 2;
  spec.v_mhz = 0.001;  // edge splitting collapses far below resolution
  const Spectrum s = spectrum_of(spec);
  const auto edges = edge_modes(s);
  REQUIRE(edges.size() == 2);
  CHECK(edges[0]->degenerate);
  CHECK(edges[1]->degenerate);
  // The well-split reference chain has no degenerate marks.
  for (const auto& mode : spectrum_of(hermitian_chain()).modes) {
    CHECK_FALSE(mode.degenerate);
  }
}

TEST_CASE("trivial dimerization: no edge modes and no warning") {
  LatticeSpec trivial = hermitian_chain();
  std::swap(trivial.v_mhz, trivial.w_mhz);  // v > w: no edge states expected
  const Spectrum s = spectrum_of(trivial);
  CHECK(edge_modes(s).empty());
  CHECK(s.warnings.empty());
}

TEST_CASE("classification warns when v < w but no mode sits in the gap") {
  // Nearly undimerized: the would-be doublet hybridizes into the band and
  // leaves the (tiny) mid-gap window empty.
  LatticeSpec weak = hermitian_chain();
  weak.v_mhz = 340.0;
  weak.w_mhz = 341.0;
  const Spectrum s = spectrum_of(weak);
  CHECK(edge_modes(s).empty());
  REQUIRE_FALSE(s.warnings.empty());
  CHECK(contains(s.warnings.front(), "mid-gap"));
}

TEST_CASE("spectrum CSV shape") {
  const Spectrum s = spectrum_of(lossy_chain());
  const std::string csv = s.to_csv();
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "m,re_ghz,loss_mhz,class,pt_tag,s1,s2,s3,s4,s5,s6,s7,s8,s9,s10,s11,s12");
  size_t rows = 0;
  std::string line;
  while (std::getline(lines, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 16);
  }
  CHECK(rows == 12);
  CHECK(contains(csv, "edge"));
  CHECK(contains(csv, "bulk"));
  CHECK(csv.back() == '\n');
}

TEST_CASE("spectrum JSON shape") {
  const Spectrum s = spectrum_of(lossy_chain());
  const nlohmann::json doc = nlohmann::json::parse(s.to_json());
  REQUIRE(doc.contains("modes"));
  REQUIRE(doc["modes"].size() == 12);
  const auto& first = doc["modes"][0];
  for (const char* key : {"m", "re_ghz", "loss_mhz", "class", "pt_tag", "pdos"}) {
    CHECK(first.contains(key));
  }
  CHECK(first["pdos"].size() == 12);
  CHECK(first["m"] == 1);
}

TEST_CASE("eigendecompose on a raw matrix leaves classification alone") {
  ComplexMatrix h;
  h.values = Eigen::MatrixXcd::Zero(2, 2);
  h.values(0, 0) = Complex(5000.0, -10.0);
  h.values(1, 1) = Complex(5100.0, -20.0);
  h.values(0, 1) = h.values(1, 0) = Complex(30.0, 0.0);
  const Spectrum s = eigendecompose(h);
  REQUIRE(s.modes.size() == 2);
  CHECK_FALSE(s.spec.has_value());
  CHECK(s.modes[0].re_ghz < s.modes[1].re_ghz);
  // Trace conservation: eigenvalue sum equals the matrix trace.
  const Complex sum = s.modes[0].value_mhz() + s.modes[1].value_mhz();
  CHECK(std::abs(sum - h.values.trace()) < 1e-9);
}

TEST_CASE("to_string for classification enums") {
  CHECK(std::string(to_string(ModeClass::edge)) == "edge");
  CHECK(std::string(to_string(ModeClass::bulk)) == "bulk");
  CHECK(std::string(to_string(PtTag::unbroken)) == "unbroken");
  CHECK(std::string(to_string(PtTag::broken_low_loss)) == "broken-low-loss");
  CHECK(std::string(to_string(PtTag::broken_high_loss)) == "broken-high-loss");
}
