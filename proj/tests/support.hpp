#pragma once

// Shared fixtures and helpers for the unit tests.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "topolattice/lattice.hpp"

namespace testsupport {

// Reference dimerized chain without loss contrast: both sublattices damped
// equally, mid-gap doublet split on the real axis.
inline topolattice::LatticeSpec hermitian_chain() {
  topolattice::LatticeSpec spec;
  spec.n_cells = 6;
  spec.omega0_ghz = 5.62;
  spec.gamma_a_mhz = 24.42;
  spec.gamma_b_mhz = 24.42;
  spec.v_mhz = 216.5;
  spec.w_mhz = 341.0;
  return spec;
}

// Chain with alternating losses: mid-gap pair PT-broken (loss-split), bulk
// still unbroken.
inline topolattice::LatticeSpec lossy_chain() {
  topolattice::LatticeSpec spec;
  spec.n_cells = 6;
  spec.omega0_ghz = 5.48;
  spec.gamma_a_mhz = 36.0;
  spec.gamma_b_mhz = 73.0;
  spec.v_mhz = 208.5;
  spec.w_mhz = 335.5;
  return spec;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    out[static_cast<size_t>(i)] =
        (i == n - 1) ? hi : lo + (hi - lo) * i / (n - 1);
  }
  return out;
}

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string tmpl =
        (std::filesystem::temp_directory_path() / "topolattice_test_XXXXXX")
            .string();
    if (!mkdtemp(tmpl.data())) {
      throw std::runtime_error("mkdtemp failed");
    }
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::string& path() const { return path_; }
  std::string file(const std::string& name) const {
    return (std::filesystem::path(path_) / name).string();
  }

 private:
  std::string path_;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

struct CmdResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs a shell command, capturing stdout and stderr separately.
inline CmdResult run_cmd(const std::string& cmd) {
  TempDir capture;
  const std::string out_path = capture.file("out");
  const std::string err_path = capture.file("err");
  const std::string full =
      cmd + " > '" + out_path + "' 2> '" + err_path + "'";
  const int status = std::system(full.c_str());
  CmdResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = read_file(out_path);
  result.err = read_file(err_path);
  return result;
}

inline std::string tool_path() { return TOPOLATTICE_TOOL_PATH; }

inline std::string golden_path(const std::string& name) {
  return (std::filesystem::path(TOPOLATTICE_GOLDEN_DIR) / name).string();
}

// Returns the message of the E thrown by fn; fails the test when nothing (or
// a different type) is thrown.
template <class E, class F>
std::string thrown_message(F&& fn) {
  try {
    fn();
  } catch (const E& e) {
    return e.what();
  } catch (const std::exception& e) {
    return std::string("wrong exception type: ") + e.what();
  }
  return "no exception thrown";
}

inline bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

inline size_t count_lines(const std::string& text) {
  size_t n = 0;
  for (char c : text) {
    if (c == '\n') ++n;
  }
  return n;
}

}  // namespace testsupport
