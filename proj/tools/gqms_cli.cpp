// Command-line front end: analyze, evolve and batch.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gqms/io.hpp"

namespace {

// Exit codes: 1 for unreadable or invalid input, 2 for usage errors.
constexpr int kInputError = 1;
constexpr int kUsageError = 2;

void write_output(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw std::runtime_error(out + ": cannot open for writing");
  f << text;
}

gqms::Vector parse_vector(const std::string& s, const char* what) {
  const auto j = gqms::io::json::parse(s);
  return gqms::io::detail::real_vector(j, what);
}

gqms::Matrix parse_matrix(const std::string& s, const char* what) {
  const auto j = gqms::io::json::parse(s);
  return gqms::io::detail::real_matrix(j, what);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian quantum Markov semigroup analysis"};
  app.require_subcommand(1);

  std::string file, out, format = "json", dir, batch_out = "reports";
  double tol = gqms::kDefaultTol;
  int nmax = 12;

  auto* analyze = app.add_subcommand("analyze", "Analyze one model file");
  analyze->add_option("file", file, "Model JSON")->required();
  analyze->add_option("--tol", tol, "Numerical tolerance")->check(CLI::PositiveNumber);
  analyze->add_option("--out", out, "Output file (stdout by default)");
  analyze->add_option("--nmax", nmax, "Bound for the rational-dependence search")->check(CLI::Range(1, 1000));
  analyze->add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));

  std::string m0_s, sigma0_s, probe_s;
  double t_end = 1.0;
  long steps = 100;
  int precision = 9;
  auto* evolve = app.add_subcommand("evolve", "Integrate first and second moments");
  evolve->add_option("file", file, "Model JSON")->required();
  evolve->add_option("--m0", m0_s, "Initial mean as a JSON array")->required();
  evolve->add_option("--sigma0", sigma0_s, "Initial covariance as a JSON array of rows")->required();
  evolve->add_option("--T", t_end, "Final time")->required()->check(CLI::NonNegativeNumber);
  evolve->add_option("--steps", steps, "Number of uniform steps")->required()->check(CLI::Range(1L, 100000000L));
  evolve->add_option("--probe", probe_s, "Probe vector for the decoherence defect");
  evolve->add_option("--out", out, "Output CSV (stdout by default)");
  evolve->add_option("--precision", precision, "Significant digits")->check(CLI::Range(1, 17));
  evolve->add_option("--tol", tol, "Numerical tolerance")->check(CLI::PositiveNumber);

  auto* batch = app.add_subcommand("batch", "Analyze every *.json model in a directory");
  batch->add_option("dir", dir, "Model directory")->required();
  batch->add_option("--out", batch_out, "Report directory")->capture_default_str();
  batch->add_option("--tol", tol, "Numerical tolerance")->check(CLI::PositiveNumber);
  batch->add_option("--nmax", nmax, "Bound for the rational-dependence search")->check(CLI::Range(1, 1000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version report success; anything else is a usage error
    return app.exit(e) == 0 ? 0 : kUsageError;
  }

  try {
    if (*analyze) {
      const auto mf = gqms::io::load_model(file, tol);
      const auto report = gqms::io::analyze(mf, {tol, nmax});
      write_output(format == "json" ? gqms::io::dump_report(report) : gqms::io::report_to_text(report), out);
    } else if (*evolve) {
      const auto mf = gqms::io::load_model(file, tol);
      gqms::io::EvolveOptions opt;
      opt.t_end = t_end;
      opt.steps = steps;
      opt.precision = precision;
      opt.tol = tol;
      if (!probe_s.empty()) opt.probe = parse_vector(probe_s, "--probe");
      const gqms::Vector m0 = parse_vector(m0_s, "--m0");
      const gqms::Matrix sigma0 = parse_matrix(sigma0_s, "--sigma0");
      write_output(gqms::io::evolve_table(mf.dd, m0, sigma0, opt), out);
    } else if (*batch) {
      const auto res = gqms::io::run_batch(dir, batch_out, {tol, nmax});
      std::cerr << res.analyzed.size() << " analyzed, " << res.failures.size() << " failed\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return 0;
}
