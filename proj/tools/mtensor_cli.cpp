// Command-line front end: solve, generate, bench, verify, fixture.
#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "mtensor/bench.hpp"
#include "mtensor/generate.hpp"
#include "mtensor/io.hpp"
#include "mtensor/npa.hpp"
#include "mtensor/structure.hpp"

namespace fs = std::filesystem;
using namespace mtensor;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitFail = 2;

struct SolverFlags {
  double tol = SolverConfig{}.tol;
  int max_iter = SolverConfig{}.max_iter;
  double delta1 = SolverConfig{}.delta1;
  double delta2 = SolverConfig{}.delta2;
  bool deterministic = false;
  bool no_scale = false;

  void add_to(CLI::App& app) {
    app.add_option("--tol", tol, "Stop once ReErr <= tol")->capture_default_str();
    app.add_option("--max-iter", max_iter, "Iteration limit")->capture_default_str();
    app.add_option("--delta1", delta1, "Coordinate backtracking base")->capture_default_str();
    app.add_option("--delta2", delta2, "Newton backtracking base")->capture_default_str();
    app.add_flag("--deterministic", deterministic, "Reproducible run (every run is; accepted for scripts)");
    app.add_flag("--no-scale", no_scale, "Iterate on the unscaled problem");
  }

  [[nodiscard]] SolverConfig config() const {
    SolverConfig cfg;
    cfg.tol = tol;
    cfg.max_iter = max_iter;
    cfg.delta1 = delta1;
    cfg.delta2 = delta2;
    cfg.deterministic = true;
    cfg.scale = !no_scale;
    return cfg;
  }
};

std::string format_vector(const Vector& x, int digits) {
  std::string out = "(";
  char buf[64];
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.*f", digits, x[i]);
    if (i > 0) out += ", ";
    out += buf;
  }
  return out + ")";
}

Vector checked_vector(const std::string& text, int n, const char* flag) {
  Vector v = parse_vector(text);
  if (v.size() != n) {
    throw FormatError(std::string(flag) + " has " + std::to_string(v.size()) + " components, expected " +
                      std::to_string(n));
  }
  return v;
}

int run_solve(const std::string& file, const SolverFlags& flags, const std::string& x0_text,
              const std::string& trace_path, bool json_out) {
  const ProblemInstance inst = load_instance(file);
  std::optional<Vector> x0;
  if (!x0_text.empty()) x0 = checked_vector(x0_text, inst.A.dim(), "--x0");

  SolveReport report;
  try {
    report = solve(inst.A, inst.b, x0, flags.config());
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }

  if (!trace_path.empty()) {
    std::ofstream out(trace_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + trace_path);
    write_trace_csv(out, report.trace);
  }
  if (json_out) {
    std::cout << report_to_json(report).dump(2) << '\n';
  } else {
    const char* start = !report.bootstrapped ? "user x0" : x0 ? "bootstrap (x0 infeasible)" : "bootstrap";
    std::cout << "start: " << start << '\n'
              << "status: " << to_string(report.status) << '\n'
              << "iterations: " << report.iterations << '\n'
              << "ReErr: " << format_real(report.re_err) << '\n'
              << "x: " << format_vector(report.x, 8) << '\n';
    if (!report.message.empty()) std::cout << "message: " << report.message << '\n';
    for (const auto& v : report.violations) std::cout << "violation: " << v << '\n';
  }
  return report.status == SolveStatus::converged ? kExitOk : kExitFail;
}

struct GenerateFlags {
  int m = 3;
  int n = 50;
  double zero_frac = 0.6;
  double density = 0.4;
  double omega = 0.1;
  std::uint64_t seed = 0;
  int count = 1;
  std::string out_dir = ".";
  std::string recipe = "planted";
};

int run_generate(const GenerateFlags& g) {
  fs::create_directories(g.out_dir);
  for (int k = 0; k < g.count; ++k) {
    const std::uint64_t seed = g.seed + static_cast<std::uint64_t>(k);
    const ProblemInstance inst = g.recipe == "planted"
                                     ? gen_planted_instance(g.m, g.n, g.zero_frac, g.density, g.omega, seed)
                                     : gen_sparse_rhs_instance(g.m, g.n, g.zero_frac, g.density, g.omega, seed);
    save_instance(fs::path(g.out_dir) / ("inst_" + std::to_string(seed) + ".json"), inst);
  }
  std::cout << "wrote " << g.count << " instance(s) to " << g.out_dir << '\n';
  return kExitOk;
}

int run_bench(const std::string& dir, const SolverFlags& flags, std::optional<double> x0_fill,
              const std::string& json_path, const std::string& csv_path, int jobs) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    std::cerr << "error: no instance files in " << dir << '\n';
    return kExitIo;
  }

  BenchOptions options;
  options.solver = flags.config();
  options.x0_fill = x0_fill;

  std::vector<BenchRow> rows(files.size());
  std::vector<std::string> load_errors;
  std::mutex mutex;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < files.size(); k = next++) {
      try {
        rows[k] = bench_instance(load_instance(files[k]), options);
      } catch (const std::exception& e) {
        const std::lock_guard lock(mutex);
        load_errors.push_back(files[k].string() + ": " + e.what());
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < std::max(jobs, 1); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (!load_errors.empty()) {
    std::sort(load_errors.begin(), load_errors.end());
    for (const auto& e : load_errors) std::cerr << "error: " << e << '\n';
    return kExitIo;
  }

  const BenchSummary summary = summarize(std::move(rows));
  if (!json_path.empty()) {
    std::ofstream out(json_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + json_path);
    out << summary_to_json(summary).dump(2) << '\n';
  }
  if (!csv_path.empty()) {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + csv_path);
    write_summary_csv(out, summary);
  }
  std::cout << "instances: " << summary.rows.size() << '\n'
            << "success rate: " << summary.success_rate << '\n'
            << "invariant violations: " << summary.invariant_violations << '\n'
            << "mean iterations: " << summary.mean_iterations << '\n';
  for (std::size_t c = 0; c < kSolutionClasses.size(); ++c) {
    std::cout << to_string(kSolutionClasses[c]) << ": " << summary.class_rates[c] << '\n';
  }
  return summary.success_rate == 1.0 && summary.invariant_violations == 0 ? kExitOk : kExitFail;
}

int run_verify(const std::string& file, const std::string& x_text, double tol) {
  const ProblemInstance inst = load_instance(file);
  const Vector x = checked_vector(x_text, inst.A.dim(), "--x");
  const double re_err = residual(inst.A, inst.b, x).norm();
  const bool nonneg = (x.array() >= 0.0).all();

  std::string cert = "inconclusive";
  bool certified = false;
  try {
    const MTensorSplit split = mtensor_split(inst.A);
    certified = split.certified();
    if (split.certification == Certification::row_sum) cert = "row-sum";
    if (split.certification == Certification::witness) cert = "witness";
  } catch (const StructureError& e) {
    cert = std::string("not an M-tensor (") + e.what() + ")";
  }

  const bool pass = re_err <= tol && nonneg && certified;
  std::cout << "ReErr: " << format_real(re_err) << '\n'
            << "nonnegative: " << (nonneg ? "yes" : "no") << '\n'
            << "M-tensor certification: " << cert << '\n'
            << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? kExitOk : kExitFail;
}

int run_fixture(const std::string& name, const std::string& out) {
  save_instance(out, named_fixture(name));
  std::cout << "wrote " << name << " to " << out << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonnegative solutions of M-tensor multilinear systems"};
  app.require_subcommand(1);

  SolverFlags solver_flags;

  auto* solve_cmd = app.add_subcommand("solve", "Solve one instance file");
  std::string solve_file, x0_text, trace_path;
  bool json_out = false;
  solve_cmd->add_option("file", solve_file, "Instance JSON")->required();
  solver_flags.add_to(*solve_cmd);
  solve_cmd->add_option("--x0", x0_text, "Starting point v1,v2,...; bootstrap when omitted");
  solve_cmd->add_option("--out-trace", trace_path, "Trace CSV path");
  solve_cmd->add_flag("--json", json_out, "Print the report as JSON");

  auto* gen_cmd = app.add_subcommand("generate", "Write random instances");
  GenerateFlags g;
  gen_cmd->add_option("--m", g.m, "Tensor order")->check(CLI::Range(3, 16))->capture_default_str();
  gen_cmd->add_option("--n", g.n, "Dimension")->check(CLI::PositiveNumber)->capture_default_str();
  gen_cmd->add_option("--zero-frac", g.zero_frac, "Fraction of zero entries in B")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  gen_cmd->add_option("--density", g.density, "Solution density (planted) or right-hand side density (sparse-rhs)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  gen_cmd->add_option("--omega", g.omega, "Diagonal margin")->check(CLI::PositiveNumber)->capture_default_str();
  gen_cmd->add_option("--seed", g.seed, "First seed")->capture_default_str();
  gen_cmd->add_option("--count", g.count, "Number of instances")->check(CLI::PositiveNumber)->capture_default_str();
  gen_cmd->add_option("--out-dir", g.out_dir, "Output directory")->capture_default_str();
  gen_cmd->add_option("--recipe", g.recipe, "planted or sparse-rhs")
      ->check(CLI::IsMember({"planted", "sparse-rhs"}))
      ->capture_default_str();

  auto* bench_cmd = app.add_subcommand("bench", "Solve every instance in a directory with auditing");
  std::string bench_dir, bench_json, bench_csv;
  std::optional<double> x0_fill;
  int jobs = 1;
  bench_cmd->add_option("dir", bench_dir, "Corpus directory")->required();
  solver_flags.add_to(*bench_cmd);
  bench_cmd->add_option("--x0-fill", x0_fill, "Start every solve at this constant vector");
  bench_cmd->add_option("--out-json", bench_json, "Summary JSON path");
  bench_cmd->add_option("--out-csv", bench_csv, "Summary CSV path");
  bench_cmd->add_option("--jobs", jobs, "Instances solved concurrently")->check(CLI::PositiveNumber);

  auto* verify_cmd = app.add_subcommand("verify", "Check a candidate solution");
  std::string verify_file, x_text;
  double verify_tol = 1e-8;
  verify_cmd->add_option("file", verify_file, "Instance JSON")->required();
  verify_cmd->add_option("--x", x_text, "Candidate v1,v2,...")->required();
  verify_cmd->add_option("--tol", verify_tol, "Largest accepted ReErr")->capture_default_str();

  auto* fixture_cmd = app.add_subcommand("fixture", "Write a built-in small instance");
  std::string fixture_name, fixture_out;
  fixture_cmd->add_option("name", fixture_name, "Fixture name")
      ->required()
      ->check(CLI::IsMember(fixture_names()));
  fixture_cmd->add_option("--out", fixture_out, "Output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitIo;
  }

  try {
    if (*solve_cmd) return run_solve(solve_file, solver_flags, x0_text, trace_path, json_out);
    if (*gen_cmd) return run_generate(g);
    if (*bench_cmd) return run_bench(bench_dir, solver_flags, x0_fill, bench_json, bench_csv, jobs);
    if (*verify_cmd) return run_verify(verify_file, x_text, verify_tol);
    if (*fixture_cmd) return run_fixture(fixture_name, fixture_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitIo;
}
