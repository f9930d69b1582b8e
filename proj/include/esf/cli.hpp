#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "esf/error.hpp"
#include "esf/intmatrix.hpp"
#include "esf/io.hpp"

namespace esf {

struct JobConfig {
  std::optional<IntMatrix> matrix;
  int m = 1;
  int J = 5;
  int grid_n = 128;
  double tol = 1e-9;
  std::string out;  // directory; empty means stdout
  std::uint64_t seed = 1;
  bool csv = false;
  bool timings = false;
};

/// Strict: unknown keys, wrong types and out-of-range values throw ConfigError.
JobConfig parse_config(const Json& j);
JobConfig load_config(const std::string& path);
/// Throws ConfigError if a required field is missing or a value is out of range.
void validate_config(const JobConfig& c);

/// 0 pass, 1 property failure, 2 config error, 3 non-isotropic, 4 mask pole.
int exit_code(ErrorCode code);

Json cmd_analyze(const JobConfig& c);
Json cmd_mask(const JobConfig& c);
Json cmd_spectrum(const JobConfig& c);
/// Columns xi_1..xi_d, mu, phi_hat on grid_n^d points of [-2 pi, 2 pi]^d.
std::string spectrum_csv(const JobConfig& c);
std::string cmd_eval(const JobConfig& c);
Json cmd_verify(const JobConfig& c, bool& passed);
Json cmd_report(const JobConfig& c, bool& passed);

/// Full command line entry point; returns the process exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace esf
