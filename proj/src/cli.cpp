#include "esf/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <ostream>

#include "esf/cascade.hpp"
#include "esf/digits.hpp"
#include "esf/matana.hpp"
#include "esf/operators.hpp"
#include "esf/properties.hpp"
#include "esf/spectral.hpp"
#include "esf/trigpoly.hpp"

namespace esf {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

template <class T>
T get_strict(const Json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const Json::exception&) {
    fail(ErrorCode::ConfigError, "config key '" + key + "' has the wrong type");
  }
}

Json poly_json(const TrigPoly& p) {
  Json arr = Json::array();
  for (const auto& [k, c] : p.coeffs()) {
    Json e;
    e["k"] = to_json(k);
    e["re"] = c.real();
    e["im"] = c.imag();
    arr.push_back(e);
  }
  return arr;
}

Json digits_json(const DigitSet& ds) {
  Json w = Json::array(), s = Json::array();
  for (const auto& v : ds.W) w.push_back(to_json(v));
  for (const auto& v : ds.S) {
    Json r = Json::array();
    for (const auto& x : v) r.push_back(x.to_string());
    s.push_back(r);
  }
  Json j;
  j["W"] = w;
  j["S"] = s;
  return j;
}

Json stencil_json(const DifferenceStencil& st) {
  Json arr = Json::array();
  for (const auto& [n, w] : st.taps) {
    Json e;
    e["n"] = to_json(n);
    e["w"] = w;
    arr.push_back(e);
  }
  Json j;
  j["d"] = st.d;
  j["taps"] = arr;
  return j;
}

SpectralProfile profile_for(const JobConfig& c, bool estimate_B) {
  SpectralOptions o;
  o.grid_n = c.grid_n;
  o.tol = c.tol;
  o.estimate_B = estimate_B;
  return make_profile(*c.matrix, c.m, o);
}

std::filesystem::path out_path(const JobConfig& c, const std::string& name) {
  return std::filesystem::path(c.out) / name;
}

void emit(const JobConfig& c, const std::string& name, const std::string& text, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  write_file_atomic(out_path(c, name), text);
}

}  // namespace

JobConfig parse_config(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::ConfigError, "config must be a JSON object");
  JobConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "matrix") {
      const auto rows = get_strict<std::vector<std::vector<std::int64_t>>>(v, key);
      if (rows.empty()) fail(ErrorCode::ConfigError, "matrix is empty");
      for (const auto& r : rows)
        if (r.size() != rows.size()) fail(ErrorCode::ConfigError, "matrix must be square");
      c.matrix = IntMatrix::from_rows(rows);
    } else if (key == "m") {
      c.m = get_strict<int>(v, key);
    } else if (key == "J") {
      c.J = get_strict<int>(v, key);
    } else if (key == "grid_n") {
      c.grid_n = get_strict<int>(v, key);
    } else if (key == "tol") {
      c.tol = get_strict<double>(v, key);
    } else if (key == "out") {
      c.out = get_strict<std::string>(v, key);
    } else if (key == "seed") {
      c.seed = get_strict<std::uint64_t>(v, key);
    } else if (key == "csv") {
      c.csv = get_strict<bool>(v, key);
    } else if (key == "timings") {
      c.timings = get_strict<bool>(v, key);
    } else {
      fail(ErrorCode::ConfigError, "unknown config key '" + key + "'");
    }
  }
  return c;
}

JobConfig load_config(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::ConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

void validate_config(const JobConfig& c) {
  if (!c.matrix) fail(ErrorCode::ConfigError, "no matrix given (--matrix or config key 'matrix')");
  if (c.m < 1) fail(ErrorCode::ConfigError, "m must be >= 1");
  if (c.J < 1 || c.J > 12) fail(ErrorCode::ConfigError, "J must be in 1..12");
  if (c.grid_n < 32) fail(ErrorCode::ConfigError, "grid_n must be >= 32");
  if (!(c.tol > 0.0)) fail(ErrorCode::ConfigError, "tol must be > 0");
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::Singular:
    case ErrorCode::NotExpanding:
      return 2;
    case ErrorCode::NotIsotropic:
    case ErrorCode::NotPD:
      return 3;
    case ErrorCode::MaskPoleAtDigit:
      return 4;
    default:
      return 1;
  }
}

Json cmd_analyze(const JobConfig& c) {
  const DilationMatrix a = validate_dilation(*c.matrix);
  const IsotropyCertificate cert = certify_isotropy(a);
  if (!cert.isotropic)
    fail(ErrorCode::NotIsotropic,
         "matrix is not isotropic (" + std::string(to_string(cert.failure_reason)) + ")");
  const QuadraticForm& q2 = *cert.witness;
  const OrthogonalPart u = orthogonal_part(a, q2);
  Json j;
  j["matrix"] = to_json(a.A);
  j["d"] = a.d;
  j["q"] = a.q;
  j["det"] = a.A.det();
  j["expanding"] = true;
  j["isotropic"] = true;
  j["solution_dim"] = q2.solution_dim;
  j["degenerate"] = q2.degenerate;
  j["Q2"] = to_json(q2.Q2);
  j["U"] = to_json(u.U);
  j["orthogonality_error"] = u.orthogonality_error;
  j["reconstruction_error"] = u.reconstruction_error;
  j["digits_A"] = digits_json(digit_set(a));
  j["digits_AT"] = digits_json(digit_set(a.A.transpose()));
  return j;
}

Json cmd_mask(const JobConfig& c) {
  const SpectralProfile p = profile_for(c, false);
  const TrigPoly mm = pow(p.m0, c.m);
  const auto coeffs = order_m_coefficients(p.A, p.m0, c.m);
  const MaskDenominator den = mask_denominator(p.G, p.digits_at);
  Json j;
  j["matrix"] = to_json(p.A.A);
  j["m"] = c.m;
  j["G"] = poly_json(p.G);
  j["m0"] = poly_json(p.m0);
  j["m0_cosine"] = cosine_form(p.m0);
  j["m0_power"] = poly_json(mm);
  j["denominator"] = static_cast<double>(den.value);
  Json cs = Json::array();
  for (const auto& [k, v] : coeffs.c) {
    Json e;
    e["k"] = to_json(k);
    e["c"] = v;
    cs.push_back(e);
  }
  j["refinement_coefficients"] = cs;
  j["stencil"] = stencil_json(build_stencil(p.Q2));
  return j;
}

Json cmd_spectrum(const JobConfig& c) {
  const SpectralProfile p = profile_for(c, false);
  const BEstimate b = estimate_B(p, c.grid_n, 3);
  SpectralProfile pb = p;
  pb.B_estimate = b.value;
  const RieszVerdict v = riesz_verdict(pb);
  Json j;
  j["matrix"] = to_json(p.A.A);
  j["m"] = c.m;
  j["B"] = b.value;
  j["B_grid"] = b.grid_value;
  j["argmax"] = b.argmax;
  j["threshold"] = v.threshold;
  j["riesz_ok"] = v.riesz_ok;
  j["decay_exponent"] = v.decay_exponent;
  j["tail_constant"] = p.tail_constant;
  return j;
}

std::string spectrum_csv(const JobConfig& c) {
  const SpectralProfile p = profile_for(c, false);
  const int d = p.dim();
  const auto mus = sample_grid(d, c.grid_n, -kTwoPi, kTwoPi, [&](std::span<const double> x) { return mu(p, x); });
  const auto phs = sample_grid(d, c.grid_n, -kTwoPi, kTwoPi,
                               [&](std::span<const double> x) { return phi_hat_order(p, x, c.m, c.tol); });
  std::string s = "#";
  for (int i = 0; i < d; ++i) s += " xi" + std::to_string(i + 1) + ",";
  s += " mu, phi_hat\n";
  std::vector<std::int64_t> idx(static_cast<std::size_t>(d), 0);
  for (std::size_t f = 0; f < mus.size(); ++f) {
    std::size_t r = f;
    for (int i = d - 1; i >= 0; --i) {
      idx[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(r % static_cast<std::size_t>(c.grid_n));
      r /= static_cast<std::size_t>(c.grid_n);
    }
    for (int i = 0; i < d; ++i)
      s += fmt17(-kTwoPi + 2 * kTwoPi * static_cast<double>(idx[static_cast<std::size_t>(i)]) / c.grid_n) + ",";
    s += fmt17(mus[f]) + "," + fmt17(phs[f]) + "\n";
  }
  return s;
}

std::string cmd_eval(const JobConfig& c) {
  const DilationMatrix a = validate_dilation(*c.matrix);
  const QuadraticForm q2 = solve_quadratic_form(a);
  const TrigPoly m0 = build_mask(a, build_G(q2), digit_set(a.A.transpose()));
  return grid_csv(sample_phi_m(a, m0, c.m, c.J));
}

Json cmd_verify(const JobConfig& c, bool& passed) {
  const SpectralProfile p = profile_for(c, true);
  PropertyConfig pc;
  pc.J = c.J;
  pc.grid_n = c.grid_n;
  pc.tol = c.tol;
  pc.seed = c.seed;
  const PropertyReport rep = run_all(p, pc);
  passed = rep.passed();
  return rep.to_json(c.timings);
}

Json cmd_report(const JobConfig& c, bool& passed) {
  Json j;
  j["analyze"] = cmd_analyze(c);
  j["mask"] = cmd_mask(c);
  j["spectrum"] = cmd_spectrum(c);
  j["verify"] = cmd_verify(c, passed);
  return j;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Elliptic scaling functions: analysis, masks, spectra, cascade samples and property checks"};
  app.require_subcommand(1);
  std::string config_path, matrix_text;
  std::optional<int> m, J, grid_n;
  std::optional<double> tol;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  bool csv = false, timings = false;
  const char* names[][2] = {{"analyze", "isotropy certificate, Q2, U and digit sets"},
                            {"mask", "G, the mask m0, refinement coefficients and the difference stencil"},
                            {"spectrum", "B estimate, Riesz verdict and decay exponent; --csv adds mu and phi_hat samples"},
                            {"eval", "cascade samples of phi^m on the level-J lattice as CSV"},
                            {"verify", "property suite; exit 1 if any check fails"},
                            {"report", "analyze, mask, spectrum and verify in one document"}};
  for (const auto& [name, desc] : names) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", config_path, "JSON job config");
    sub->add_option("--matrix", matrix_text, "dilation matrix, rows separated by ';', e.g. \"1,-1;1,1\"");
    sub->add_option("--m", m, "order m (default 1)");
    sub->add_option("--J", J, "cascade level (default 5)");
    sub->add_option("--grid-n", grid_n, "grid points per axis (default 128)");
    sub->add_option("--tol", tol, "truncation tolerance for M (default 1e-9)");
    sub->add_option("--out", out_dir, "output directory; stdout if omitted");
    sub->add_option("--seed", seed, "seed for sampled checks (default 1)");
    sub->add_flag("--csv", csv, "also write spectrum.csv (spectrum, report)");
    sub->add_flag("--timings", timings, "include per-check runtimes (verify, report)");
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 2;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    JobConfig c = config_path.empty() ? JobConfig{} : load_config(config_path);
    if (!matrix_text.empty()) c.matrix = parse_matrix(matrix_text);
    if (m) c.m = *m;
    if (J) c.J = *J;
    if (grid_n) c.grid_n = *grid_n;
    if (tol) c.tol = *tol;
    if (out_dir) c.out = *out_dir;
    if (seed) c.seed = *seed;
    c.csv = c.csv || csv;
    c.timings = c.timings || timings;
    validate_config(c);
    if (!c.out.empty()) std::filesystem::create_directories(c.out);
    if (c.csv && c.out.empty() && (cmd == "spectrum" || cmd == "report"))
      fail(ErrorCode::ConfigError, "--csv needs --out");

    bool passed = true;
    if (cmd == "analyze") {
      emit(c, "analyze.json", dump_json(cmd_analyze(c)) + "\n", out);
    } else if (cmd == "mask") {
      const Json j = cmd_mask(c);
      emit(c, "mask.json", dump_json(j) + "\n", out);
      if (!c.out.empty()) {
        write_file_atomic(out_path(c, "mask.txt"), j["m0_cosine"].get<std::string>() + "\n");
        write_file_atomic(out_path(c, "stencil.json"), dump_json(j["stencil"]) + "\n");
      }
    } else if (cmd == "spectrum") {
      emit(c, "spectrum.json", dump_json(cmd_spectrum(c)) + "\n", out);
      if (c.csv) write_file_atomic(out_path(c, "spectrum.csv"), spectrum_csv(c));
    } else if (cmd == "eval") {
      emit(c, "grid.csv", cmd_eval(c), out);
    } else if (cmd == "verify") {
      emit(c, "verify.json", dump_json(cmd_verify(c, passed)) + "\n", out);
    } else {
      const Json j = cmd_report(c, passed);
      emit(c, "report.json", dump_json(j) + "\n", out);
      if (c.csv) write_file_atomic(out_path(c, "spectrum.csv"), spectrum_csv(c));
      if (!c.out.empty()) write_file_atomic(out_path(c, "grid.csv"), cmd_eval(c));
    }
    return passed ? 0 : 1;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error [io]: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace esf
