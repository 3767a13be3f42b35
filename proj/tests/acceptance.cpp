// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any hard
// criterion fails. Trace and bench tables go to acceptance_*.csv in the
// working directory.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mtensor/bench.hpp"
#include "mtensor/generate.hpp"
#include "mtensor/io.hpp"
#include "mtensor/npa.hpp"
#include "mtensor/oracle.hpp"
#include "oracles.hpp"

using namespace mtensor;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  bool soft = false;
  std::string detail;
};

void fail(Outcome& o, const std::string& why) {
  if (o.pass) o.detail = why;
  o.pass = false;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string vec(const Vector& x) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) s += (i ? ", " : "") + fmt("%.10g", x[i]);
  return s + ")";
}

// Criteria 1 and 2.
Outcome fixture_runs(const std::string& name, const std::vector<Vector>& starts, const Vector& expect) {
  Outcome o;
  const ProblemInstance inst = named_fixture(name);
  SolverConfig cfg;
  cfg.tol = 1e-10;
  cfg.audit = true;
  std::ostringstream d;
  for (const auto& x0 : starts) {
    const auto t0 = Clock::now();
    const SolveReport r = solve(inst.A, inst.b, x0, cfg);
    const double wall = seconds_since(t0);
    d << vec(x0) << " -> " << vec(r.x) << " in " << r.iterations << " it, ReErr " << fmt("%.2e", r.re_err) << ", "
      << fmt("%.3f", wall) << " s; ";
    if (r.status != SolveStatus::converged) fail(o, vec(x0) + ": status " + std::string(to_string(r.status)));
    if (!r.violations.empty()) fail(o, vec(x0) + ": " + r.violations.front());
    if (!(r.re_err <= 1e-10)) fail(o, vec(x0) + ": ReErr " + fmt("%.3e", r.re_err));
    if (!((r.x - expect).lpNorm<Eigen::Infinity>() <= 1e-8)) fail(o, vec(x0) + ": converged to " + vec(r.x));
    if (!(wall < 1.0)) fail(o, vec(x0) + ": took " + fmt("%.3f", wall) + " s");
  }
  if (o.pass) o.detail = d.str();
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto t0 = Clock::now();
  const ProblemInstance inst = named_fixture("example1-b01");
  const auto found = enumerate_nonneg_solutions(inst.A, inst.b, 10.0, 50, 1e-10);
  const std::vector<Vector> expect = {Vector{{0.0, 1.0}}, Vector{{2.0, 1.0}}};
  if (found.size() != expect.size()) {
    fail(o, "oracle found " + std::to_string(found.size()) + " solutions");
  } else {
    for (std::size_t k = 0; k < found.size(); ++k) {
      if ((found[k] - expect[k]).norm() > 1e-6) fail(o, "oracle solution " + vec(found[k]));
    }
  }
  SolverConfig cfg;
  cfg.audit = true;
  std::ostringstream d;
  d << "oracle {";
  for (const auto& s : found) d << vec(s) << " ";
  d << "}; NPA";
  for (const auto& x0 : {std::optional<Vector>{}, std::optional<Vector>{Vector{{20.0, 20.0}}},
                         std::optional<Vector>{Vector{{2.5, 1.5}}}}) {
    const SolveReport r = solve(inst.A, inst.b, x0, cfg);
    bool member = false;
    for (const auto& s : found) member = member || (r.x - s).norm() <= 1e-6;
    if (r.status != SolveStatus::converged || !member) fail(o, "NPA returned " + vec(r.x));
    d << " " << vec(r.x);
  }
  const double wall = seconds_since(t0);
  if (!(wall < 10.0)) fail(o, "took " + fmt("%.2f", wall) + " s");
  if (o.pass) o.detail = d.str() + ", " + fmt("%.2f", wall) + " s";
  return o;
}

struct CorpusStats {
  int instances = 0;
  int violations = 0;
  int not_converged = 0;
  int above_1e8 = 0;
  std::string first_problem;
};

void audit_corpus(CorpusStats& st, int m, int n, int count, std::uint64_t seed0,
                  std::vector<SolveReport>* keep = nullptr) {
  BenchOptions opts;
  opts.solver.tol = 1e-10;
  for (int k = 0; k < count; ++k) {
    const std::uint64_t seed = seed0 + static_cast<std::uint64_t>(k);
    const ProblemInstance inst = gen_planted_instance(m, n, 0.8, 0.4, 0.1, seed);
    SolveReport rep;
    const BenchRow row = bench_instance(inst, opts, &rep);
    ++st.instances;
    const std::string tag = "(" + std::to_string(m) + "," + std::to_string(n) + ") seed " + std::to_string(seed);
    if (!row.violations.empty()) {
      ++st.violations;
      if (st.first_problem.empty()) st.first_problem = tag + ": " + row.violations.front();
    }
    if (row.status != "converged") {
      ++st.not_converged;
      if (st.first_problem.empty()) st.first_problem = tag + ": status " + row.status;
    }
    if (!(row.re_err <= 1e-8)) ++st.above_1e8;
    if (keep) keep->push_back(std::move(rep));
  }
}

Outcome criterion4(std::vector<SolveReport>& corpus350) {
  Outcome o;
  const auto t0 = Clock::now();
  CorpusStats st;
  audit_corpus(st, 3, 50, 100, 0, &corpus350);
  audit_corpus(st, 4, 20, 20, 0);
  const double wall = seconds_since(t0);
  if (st.violations > 0) fail(o, std::to_string(st.violations) + " audited violations; " + st.first_problem);
  if (st.above_1e8 > 0 || st.not_converged > 0) {
    fail(o, std::to_string(st.above_1e8) + " runs above 1e-8, " + std::to_string(st.not_converged) +
                " not converged; " + st.first_problem);
  }
  if (!(wall < 300.0)) fail(o, "took " + fmt("%.1f", wall) + " s");
  if (o.pass) {
    o.detail = std::to_string(st.instances) + " solves (100 x (3,50), 20 x (4,20)), 0 violations, all ReErr <= 1e-8, " +
               fmt("%.1f", wall) + " s";
  }
  return o;
}

Outcome criterion5() {
  Outcome o;
  SolverConfig cfg;
  cfg.audit = true;
  int converged = 0;
  double min_component = 1e300;
  for (std::uint64_t seed = 1000; seed < 1050; ++seed) {
    ProblemInstance inst = gen_planted_instance(3, 30, 0.8, 0.4, 0.1, seed);
    inst.b.array() += 0.01;
    const SolveReport r = solve(inst.A, inst.b, std::nullopt, cfg);
    if (!r.violations.empty()) fail(o, "seed " + std::to_string(seed) + ": " + r.violations.front());
    if (r.status != SolveStatus::converged) {
      fail(o, "seed " + std::to_string(seed) + ": status " + std::string(to_string(r.status)));
      continue;
    }
    ++converged;
    min_component = std::min(min_component, r.x.minCoeff());
    if (!(r.x.array() > 0.0).all()) fail(o, "seed " + std::to_string(seed) + ": zero component in solution");
  }
  if (o.pass) {
    o.detail = std::to_string(converged) + "/50 converged, all strictly positive, smallest component " +
               fmt("%.3e", min_component);
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  double worst_sym = 0.0, worst_jac = 0.0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const int m = 3 + static_cast<int>(k % 3);
    const int n = 3 + static_cast<int>((k * 7) % 8);
    const SquareTensor A = k % 2 == 0 ? gen_random_mtensor(m, n, 0.8, 0.1, 700 + k)
                                      : oracle::random_tensor(m, n, 0.3, 700 + k);
    const SquareTensor Abar = semi_symmetrize(A);
    const Vector x = oracle::random_positive(n, 800 + k);
    const Vector y = contract_m1(A, x);
    const double sym = (contract_m1(Abar, x) - y).lpNorm<Eigen::Infinity>() /
                       std::max(1.0, y.lpNorm<Eigen::Infinity>());
    const Matrix fd = oracle::fd_jacobian([&](const Vector& v) { return contract_m1(A, v); }, x);
    const double jac = oracle::rel_diff(jacobian(Abar, x), fd);
    worst_sym = std::max(worst_sym, sym);
    worst_jac = std::max(worst_jac, jac);
  }
  if (!(worst_sym <= 1e-12)) fail(o, "symmetrization mismatch " + fmt("%.3e", worst_sym));
  if (!(worst_jac <= 1e-6)) fail(o, "Jacobian vs finite differences " + fmt("%.3e", worst_jac));
  if (o.pass) {
    o.detail = "20 tensors, max contraction drift " + fmt("%.2e", worst_sym) + ", max Jacobian error " +
               fmt("%.2e", worst_jac);
  }
  return o;
}

Outcome criterion7(const std::vector<SolveReport>& corpus350) {
  Outcome o;
  int steps = 0, contracting = 0;
  for (const auto& r : corpus350) {
    for (std::size_t k = 5; k + 1 < r.trace.size(); ++k) {
      ++steps;
      if (r.trace[k + 1].re_err <= 0.95 * r.trace[k].re_err) ++contracting;
    }
  }
  const double share = steps > 0 ? static_cast<double>(contracting) / steps : 1.0;

  // Byte-identical trace CSVs across two runs of every (3,50) instance.
  int mismatches = 0;
  SolverConfig cfg;
  cfg.deterministic = true;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const ProblemInstance inst = gen_planted_instance(3, 50, 0.8, 0.4, 0.1, seed);
    std::ostringstream a, b;
    write_trace_csv(a, solve(inst.A, inst.b, std::nullopt, cfg).trace);
    write_trace_csv(b, solve(inst.A, inst.b, std::nullopt, cfg).trace);
    if (a.str() != b.str()) ++mismatches;
    if (seed == 0) std::ofstream("acceptance_trace_3_50_seed0.csv", std::ios::binary) << a.str();
  }
  if (mismatches > 0) fail(o, std::to_string(mismatches) + " trace CSVs differ between runs");
  const std::string rate = std::to_string(contracting) + "/" + std::to_string(steps) + " steps past the 5th contract by 0.95 (" +
                           fmt("%.1f", 100.0 * share) + "%)";
  if (o.pass) {
    o.detail = rate + "; trace CSVs byte-identical over 100 double runs";
    if (share < 0.8) {
      o.soft = true;
      o.detail += "; linear-rate share below 80% (soft, logged)";
    }
  }
  return o;
}

Outcome criterion8() {
  Outcome o;
  const auto t0 = Clock::now();
  BenchOptions opts;
  opts.solver.tol = 1e-8;
  opts.x0_fill = 10.0;
  std::vector<BenchRow> rows;
  int negative = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const ProblemInstance inst = gen_sparse_rhs_instance(3, 200, 0.6, 0.4, 0.1, seed);
    SolveReport rep;
    rows.push_back(bench_instance(inst, opts, &rep));
    if (rep.x.size() > 0 && (rep.x.array() < 0.0).any()) ++negative;
  }
  const BenchSummary s = summarize(std::move(rows));
  const double wall = seconds_since(t0);
  {
    std::ofstream csv("acceptance_sparse_rhs_3_200.csv", std::ios::binary);
    write_summary_csv(csv, s);
  }
  if (s.success_rate < 1.0) fail(o, "success rate " + fmt("%.2f", s.success_rate));
  if (s.invariant_violations > 0) fail(o, std::to_string(s.invariant_violations) + " invariant violations");
  if (negative > 0) fail(o, std::to_string(negative) + " solutions with a negative component");
  if (!(wall < 900.0)) fail(o, "took " + fmt("%.1f", wall) + " s");
  std::ostringstream d;
  d << "success " << fmt("%.0f", 100.0 * s.success_rate) << "%, classes:";
  for (std::size_t c = 0; c < kSolutionClasses.size(); ++c) {
    d << " " << to_string(kSolutionClasses[c]) << " " << fmt("%.0f", 100.0 * s.class_rates[c]) << "%";
  }
  d << "; mean " << fmt("%.1f", s.mean_iterations) << " it, " << fmt("%.1f", wall) << " s total";
  if (o.pass) o.detail = d.str();
  return o;
}

}  // namespace

int main() {
  std::vector<SolveReport> corpus350;
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, [] { return fixture_runs("example2-i", {Vector{{0.0, 20.0}}, Vector{{20.0, 0.001}}, Vector{{20.0, 20.0}}},
                                   Vector{{0.0, 2.0}}); }},
      {2, [] { return fixture_runs("example2-ii", {Vector{{0.001, 20.0}}, Vector{{20.0, 0.0}}, Vector{{20.0, 20.0}}},
                                   Vector{{2.0, 0.0}}); }},
      {3, criterion3},
      {4, [&] { return criterion4(corpus350); }},
      {5, criterion5},
      {6, criterion6},
      {7, [&] { return criterion7(corpus350); }},
      {8, criterion8},
  };
  int failures = 0;
  for (const auto& [id, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failures;
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << (o.soft ? " (soft note)" : "") << " | "
              << o.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
