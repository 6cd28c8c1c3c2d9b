#include "commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "bskm/errors.hpp"
#include "bskm/matrix_market.hpp"
#include "bskm/problems.hpp"
#include "bskm/theory.hpp"

namespace bskm::cli {

namespace {

constexpr double kInequalitySlack = 1e-10;
constexpr double kXiSlack = 1e-12;

bool is_bskm2_family(Method method) {
  return method == Method::bskm2 || method == Method::bskm2_pf;
}

bool uses_beta(Method method) { return method == Method::skm || method == Method::bskm1; }

Method method_or_throw(const std::string& name) {
  const auto method = parse_method(name);
  if (!method) {
    throw UsageError("unknown method '" + name + "' (rk, motzkin, skm, bskm1, bskm2, bskm2-pf)");
  }
  return *method;
}

ResidualPolicy residual_or_throw(const std::string& name) {
  if (name == "cached") return ResidualPolicy::cached;
  if (name == "on-demand") return ResidualPolicy::on_demand;
  throw UsageError("unknown residual policy '" + name + "' (cached, on-demand)");
}

WeightsMode weights_or_throw(const std::string& name) {
  if (name == "uniform") return WeightsMode::uniform;
  if (name == "row-norm") return WeightsMode::row_norm;
  throw UsageError("unknown weights '" + name + "' (uniform, row-norm)");
}

void validate_for(const SolverConfig& cfg, Index m) {
  try {
    cfg.validate(m);
  } catch (const ContractViolation& e) {
    throw UsageError(e.what());
  }
}

RunRecord make_record(const SolverConfig& cfg, const LinearSystem& system, Index beta_field,
                      std::uint64_t seed, Index trial, const SolveReport& report) {
  RunRecord r;
  r.method = std::string(to_string(cfg.method));
  r.m = system.A.rows();
  r.n = system.A.cols();
  r.beta = beta_field;
  r.eta = is_bskm2_family(cfg.method) ? cfg.eta : 0;
  r.beta_j = is_bskm2_family(cfg.method) ? cfg.beta_j : 0;
  r.seed = seed;
  r.trial = trial;
  r.iterations = report.iterations;
  r.cpu_time_s = report.wall_time_s;
  r.final_res = report.final_res;
  r.termination = std::string(to_string(report.termination));
  return r;
}

// ---------------------------------------------------------------- solve

struct SolveOptions {
  std::string matrix;
  std::vector<Index> random;
  std::string method;
  Index beta = 0;
  Index eta = 0;
  Index beta_j = 0;
  double tol = 1e-6;
  long max_iters = 200'000;
  std::uint64_t seed = 0;
  std::string out;
  std::string weights = "uniform";
  std::string residual = "cached";
  std::string history;
  long history_stride = 1;
  bool no_reference = false;
};

struct SolveFlags {
  CLI::Option* random = nullptr;
  CLI::Option* matrix = nullptr;
  CLI::Option* beta = nullptr;
  CLI::Option* eta = nullptr;
  CLI::Option* beta_j = nullptr;
  CLI::Option* weights = nullptr;
};

SolveFlags add_solve_options(CLI::App& cmd, SolveOptions& o) {
  SolveFlags f;
  f.matrix = cmd.add_option("--matrix", o.matrix, "Matrix Market file (x* ~ N(0, I) from --seed)");
  f.random = cmd.add_option("--random", o.random, "Gaussian system with M rows and N columns")
                 ->expected(2)
                 ->type_name("M N");
  f.matrix->excludes(f.random);
  cmd.add_option("--method", o.method, "rk | motzkin | skm | bskm1 | bskm2 | bskm2-pf")->required();
  f.beta = cmd.add_option("--beta", o.beta, "Sample size (skm, bskm1; bskm2 derives beta_j)");
  f.eta = cmd.add_option("--eta", o.eta, "Number of disjoint sub-samples (bskm2, bskm2-pf)");
  f.beta_j = cmd.add_option("--beta-j", o.beta_j, "Sub-sample size (default floor(beta/eta))");
  cmd.add_option("--tol", o.tol, "Stopping threshold on RES")->capture_default_str();
  cmd.add_option("--max-iters", o.max_iters, "Iteration cap")->capture_default_str();
  cmd.add_option("--seed", o.seed, "Seed for the system and the sampler")->capture_default_str();
  cmd.add_option("--out", o.out, "Append the run record to this CSV");
  f.weights = cmd.add_option("--weights", o.weights, "bskm2-pf weights: uniform | row-norm");
  cmd.add_option("--residual", o.residual, "Residual policy: cached | on-demand")
      ->capture_default_str();
  cmd.add_option("--history", o.history, "Write the RES history (iteration,metric) here");
  cmd.add_option("--history-stride", o.history_stride, "Record every k-th iteration")
      ->capture_default_str();
  cmd.add_flag("--no-reference", o.no_reference,
               "Skip A+b; stop on the relative residual instead of RES");
  return f;
}

SolverConfig solve_config(const SolveOptions& o, const SolveFlags& f) {
  if (!f.matrix->count() && !f.random->count()) {
    throw UsageError("give either --matrix PATH or --random M N");
  }
  SolverConfig cfg;
  cfg.method = method_or_throw(o.method);
  const bool family2 = is_bskm2_family(cfg.method);
  if (!family2 && (f.eta->count() || f.beta_j->count())) {
    throw UsageError("--eta and --beta-j apply to bskm2 and bskm2-pf only");
  }
  if (cfg.method != Method::bskm2_pf && f.weights->count()) {
    throw UsageError("--weights applies to bskm2-pf only");
  }
  if (!uses_beta(cfg.method) && !family2 && f.beta->count()) {
    throw UsageError("--beta does not apply to " + o.method);
  }
  if (uses_beta(cfg.method) && !f.beta->count()) throw UsageError(o.method + " needs --beta");
  if (family2) {
    if (!f.eta->count()) throw UsageError(o.method + " needs --eta");
    cfg.eta = o.eta;
    if (f.beta_j->count()) {
      cfg.beta_j = o.beta_j;
    } else if (f.beta->count()) {
      cfg.beta_j = default_beta_j(o.beta, o.eta);
    } else {
      throw UsageError(o.method + " needs --beta-j or --beta");
    }
  }
  cfg.beta = o.beta;
  cfg.res_tol = o.tol;
  cfg.max_iters = o.max_iters;
  cfg.seed = o.seed;
  cfg.history_stride = o.history_stride;
  cfg.weights = weights_or_throw(o.weights);
  cfg.residual = residual_or_throw(o.residual);
  return cfg;
}

int do_solve(const SolveOptions& o, const SolveFlags& f, std::ostream& out) {
  const SolverConfig cfg = solve_config(o, f);
  LinearSystem system;
  if (f.matrix->count()) {
    system = system_from_matrix(parse_matrix_market(std::filesystem::path(o.matrix)), o.seed,
                                MatrixMarketSource{o.matrix});
  } else {
    if (o.random[0] < 1 || o.random[1] < 1) throw UsageError("--random needs positive M and N");
    system = generate_gaussian(o.random[0], o.random[1], o.seed);
  }
  validate_for(cfg, system.A.rows());
  if (!o.no_reference) prepare_reference(system);

  const SolveReport report = solve(system, cfg);
  Index beta_field = 0;
  if (uses_beta(cfg.method)) beta_field = cfg.beta;
  if (is_bskm2_family(cfg.method)) beta_field = f.beta->count() ? o.beta : cfg.eta * cfg.beta_j;
  const RunRecord record = make_record(cfg, system, beta_field, o.seed, 0, report);

  out << "method=" << record.method << " m=" << record.m << " n=" << record.n
      << " beta=" << record.beta << " eta=" << record.eta << " beta_j=" << record.beta_j
      << " iterations=" << record.iterations << " cpu_time_s=" << record.cpu_time_s
      << " final_" << to_string(report.stopping) << "=" << record.final_res
      << " termination=" << record.termination << '\n';

  if (!o.out.empty()) append_csv({record}, std::filesystem::path(o.out));
  if (!o.history.empty()) {
    std::ofstream hist(o.history);
    if (!hist) throw IoError("cannot write " + o.history);
    hist << "iteration," << to_string(report.stopping) << '\n' << std::setprecision(17);
    for (const auto& p : report.res_history) hist << p.iteration << ',' << p.metric << '\n';
  }
  return kSuccess;
}

// ---------------------------------------------------------------- sweep

struct SweepOptions {
  std::string axis = "beta";
  std::vector<Index> values;
  Index m = 0;
  Index n = 0;
  Index beta = 0;
  Index eta = 0;
  Index beta_j = 0;
  std::vector<std::string> methods{"skm", "bskm1", "bskm2"};
  Index trials = 5;
  std::uint64_t seed_base = 0;
  double tol = 1e-6;
  long max_iters = 200'000;
  std::string residual = "cached";
  std::string matrix;
  unsigned jobs = 1;
  std::string out;
  bool quiet = false;
};

void add_sweep_options(CLI::App& cmd, SweepOptions& o) {
  cmd.add_option("--axis", o.axis, "Swept parameter: beta | m | n")->capture_default_str();
  cmd.add_option("--values", o.values, "Comma-separated increasing axis values")
      ->delimiter(',')
      ->required();
  cmd.add_option("--m", o.m, "Rows (fixed unless --axis m)");
  cmd.add_option("--n", o.n, "Columns (fixed unless --axis n)");
  cmd.add_option("--beta", o.beta, "Sample size (fixed unless --axis beta)");
  cmd.add_option("--eta", o.eta, "Sub-sample count for bskm2 (default: eta = beta)");
  cmd.add_option("--beta-j", o.beta_j, "Sub-sample size for bskm2 (default floor(beta/eta))");
  cmd.add_option("--methods", o.methods, "Comma-separated methods")
      ->delimiter(',')
      ->capture_default_str();
  cmd.add_option("--trials", o.trials, "Trials per point")->capture_default_str();
  cmd.add_option("--seed-base", o.seed_base, "Trial t uses seed seed-base + t")
      ->capture_default_str();
  cmd.add_option("--tol", o.tol, "Stopping threshold on RES")->capture_default_str();
  cmd.add_option("--max-iters", o.max_iters, "Iteration cap")->capture_default_str();
  cmd.add_option("--residual", o.residual, "Residual policy: cached | on-demand")
      ->capture_default_str();
  cmd.add_option("--matrix", o.matrix, "Matrix Market file shared by all runs (beta axis)");
  cmd.add_option("--jobs", o.jobs, "Worker threads")->capture_default_str();
  cmd.add_option("--out", o.out, "CSV with one row per run")->required();
  cmd.add_flag("--quiet", o.quiet, "No per-run progress lines");
}

SweepPlan to_plan(const SweepOptions& o) {
  SweepPlan plan;
  if (o.axis == "beta") {
    plan.axis = SweepAxis::beta;
  } else if (o.axis == "m") {
    plan.axis = SweepAxis::m;
  } else if (o.axis == "n") {
    plan.axis = SweepAxis::n;
  } else {
    throw UsageError("unknown axis '" + o.axis + "' (beta, m, n)");
  }
  plan.values = o.values;
  plan.m = o.m;
  plan.n = o.n;
  plan.beta = o.beta;
  plan.eta = o.eta;
  plan.beta_j = o.beta_j;
  for (const auto& name : o.methods) plan.methods.push_back(method_or_throw(name));
  plan.trials = o.trials;
  plan.seed_base = o.seed_base;
  plan.tol = o.tol;
  plan.max_iters = o.max_iters;
  plan.residual = residual_or_throw(o.residual);
  if (!o.matrix.empty()) plan.matrix = o.matrix;
  plan.jobs = o.jobs;
  plan.output = o.out;
  return plan;
}

struct PointConfig {
  SolverConfig cfg;
  Index beta_field = 0;
};

PointConfig point_config(const SweepPlan& plan, Method method, Index beta, std::uint64_t seed) {
  PointConfig p;
  p.cfg.method = method;
  p.cfg.beta = beta;
  p.cfg.eta = plan.eta > 0 ? plan.eta : beta;
  p.cfg.beta_j = plan.beta_j > 0 ? plan.beta_j : default_beta_j(beta, p.cfg.eta);
  p.cfg.res_tol = plan.tol;
  p.cfg.max_iters = plan.max_iters;
  p.cfg.seed = seed;
  p.cfg.residual = plan.residual;
  p.cfg.history_stride = std::max(1L, plan.max_iters);
  p.beta_field = beta;
  return p;
}

struct SweepGroup {
  Index m = 0;
  Index n = 0;
  Index trial = 0;
  // (value index, beta) pairs solved on this group's system.
  std::vector<std::pair<std::size_t, Index>> points;
};

std::vector<SweepGroup> plan_groups(const SweepPlan& plan) {
  std::vector<SweepGroup> groups;
  if (plan.axis == SweepAxis::beta) {
    for (Index t = 0; t < plan.trials; ++t) {
      SweepGroup g{plan.m, plan.n, t, {}};
      for (std::size_t v = 0; v < plan.values.size(); ++v) g.points.emplace_back(v, plan.values[v]);
      groups.push_back(std::move(g));
    }
    return groups;
  }
  for (std::size_t v = 0; v < plan.values.size(); ++v) {
    for (Index t = 0; t < plan.trials; ++t) {
      SweepGroup g{plan.axis == SweepAxis::m ? plan.values[v] : plan.m,
                   plan.axis == SweepAxis::n ? plan.values[v] : plan.n, t, {{v, plan.beta}}};
      groups.push_back(std::move(g));
    }
  }
  return groups;
}

// ---------------------------------------------------------------- verify-bounds

struct VerifyOptions {
  Index m = 8;
  Index n = 3;
  Index beta = 0;
  Index eta = 0;
  Index beta_j = 0;
  Index seeds = 20;
  std::uint64_t seed_base = 0;
  Index steps = 0;
  bool per_sample = false;
};

struct CheckTally {
  std::string name;
  Index evaluated = 0;
  Index failed = 0;
  double worst = -std::numeric_limits<double>::infinity();

  void record(double excess, double slack) {
    ++evaluated;
    worst = std::max(worst, excess);
    if (excess > slack) ++failed;
  }
};

void print_bound_row(std::ostream& out, std::uint64_t seed, Index step, const BoundReport& r,
                     Index samples, double max_excess) {
  out << std::setw(6) << seed << std::setw(6) << step << std::setw(14) << r.xi_k << std::setw(16)
      << r.theorem2_factor << std::setw(16) << r.theorem3_factor << std::setw(14)
      << r.spectral.lambda_max << std::setw(16) << r.spectral.lambda_min_pos << std::setw(6)
      << r.spectral.rank << std::setw(9) << samples << std::setw(14) << max_excess << '\n';
}

int do_verify(const VerifyOptions& o, std::ostream& out) {
  const bool check2 = o.beta > 0;
  const bool check3 = o.eta > 0 || o.beta_j > 0;
  if (!check2 && !check3) throw UsageError("give --beta and/or --eta with --beta-j");
  if (check3 && (o.eta < 1 || o.beta_j < 1)) throw UsageError("--eta and --beta-j go together");
  if (o.m < 1 || o.n < 1 || o.seeds < 1 || o.steps < 0) {
    throw UsageError("--m, --n and --seeds must be positive, --steps nonnegative");
  }
  if (check2 && o.beta > o.m) throw UsageError("--beta exceeds --m");
  if (check3 && o.eta * o.beta_j > o.m) throw UsageError("eta*beta_j exceeds --m");
  if (check2 && binomial(o.m, o.beta) > kEnumerationLimit) {
    std::ostringstream msg;
    msg << "exact enumeration over (" << o.m << " choose " << o.beta << ") = "
        << binomial(o.m, o.beta) << " samples exceeds " << kEnumerationLimit
        << "; use a smaller --m or --beta";
    throw UsageError(msg.str());
  }

  CheckTally t2{"theorem2-per-sample"};
  CheckTally xi_low{"xi-lower-bound"};
  CheckTally xi_high{"xi-upper-bound"};
  CheckTally e2{"theorem2-expected-contraction"};
  CheckTally t3{"theorem3-per-sample"};
  CheckTally e3{"theorem3-expected-contraction"};

  out << std::setprecision(6);
  out << std::setw(6) << "seed" << std::setw(6) << "step" << std::setw(14) << "xi_k"
      << std::setw(16) << "theorem2_factor" << std::setw(16) << "theorem3_factor" << std::setw(14)
      << "lambda_max" << std::setw(16) << "lambda_min_pos" << std::setw(6) << "rank"
      << std::setw(9) << "samples" << std::setw(14) << "max_excess" << '\n';

  for (Index s = 0; s < o.seeds; ++s) {
    const std::uint64_t seed = o.seed_base + static_cast<std::uint64_t>(s);
    const LinearSystem system = generate_gaussian(o.m, o.n, seed);
    const Vector x_star = min_norm_solution(system.A, system.b);
    SolverConfig walk;
    walk.method = check2 ? Method::bskm1 : Method::bskm2;
    walk.beta = std::max<Index>(o.beta, 1);
    walk.eta = std::max<Index>(o.eta, 1);
    walk.beta_j = std::max<Index>(o.beta_j, 1);
    walk.seed = seed;
    IterateState state(system.A, system.b, walk);

    for (Index step_no = 0; step_no <= o.steps; ++step_no) {
      const Vector& x = state.x;
      if ((system.b - system.A.multiply(x)).cwiseAbs().maxCoeff() == 0.0) break;
      BoundReport report;
      IndexSet all(static_cast<std::size_t>(o.m));
      for (Index i = 0; i < o.m; ++i) all[i] = i;
      report.spectral = gram_extreme_eigs(system.A.gather_rows(all));
      report.theorem2_factor = std::nan("");
      report.theorem3_factor = std::nan("");
      Index samples = 0;
      double max_excess = -std::numeric_limits<double>::infinity();

      if (check2) {
        report.xi_k = xi_exact(system.A, system.b, x, o.beta);
        xi_low.record(1.0 - report.xi_k, kXiSlack);
        xi_high.record(report.xi_k - static_cast<double>(o.beta), kXiSlack);
        const auto bounds = verify_theorem2_per_sample(system.A, system.b, x, x_star, o.beta);
        for (std::size_t i = 0; i < bounds.size(); ++i) {
          t2.record(bounds[i].lhs - bounds[i].rhs, kInequalitySlack);
          max_excess = std::max(max_excess, bounds[i].lhs - bounds[i].rhs);
          report.per_sample_slack.push_back({static_cast<Index>(i), bounds[i].lhs, bounds[i].rhs});
        }
        samples += static_cast<Index>(bounds.size());
        const auto ec = expected_contraction_exact(Method::bskm1, system.A, system.b, x, x_star,
                                                   {o.beta, 1, 1});
        e2.record(ec.expected_lhs - ec.bound_rhs, kInequalitySlack);
        report.theorem2_factor = ec.worst_factor;
      }
      if (check3) {
        const auto bounds =
            verify_theorem3_per_sample(system.A, system.b, x, x_star, o.eta, o.beta_j);
        for (std::size_t i = 0; i < bounds.size(); ++i) {
          t3.record(bounds[i].lhs - bounds[i].rhs, kInequalitySlack);
          max_excess = std::max(max_excess, bounds[i].lhs - bounds[i].rhs);
          report.per_sample_slack.push_back(
              {static_cast<Index>(samples + static_cast<Index>(i)), bounds[i].lhs, bounds[i].rhs});
        }
        samples += static_cast<Index>(bounds.size());
        const auto ec = expected_contraction_exact(Method::bskm2, system.A, system.b, x, x_star,
                                                   {1, o.eta, o.beta_j});
        e3.record(ec.expected_lhs - ec.bound_rhs, kInequalitySlack);
        report.theorem3_factor = ec.worst_factor;
      }
      print_bound_row(out, seed, step_no, report, samples, max_excess);
      if (o.per_sample) {
        for (const auto& e : report.per_sample_slack) {
          out << "  sample " << e.sample_id << " lhs=" << e.lhs << " rhs=" << e.rhs << '\n';
        }
      }
      if (step_no < o.steps) step(state, system.A, system.b, walk);
    }
  }

  bool all_pass = true;
  for (const CheckTally* t : {&t2, &xi_low, &xi_high, &e2, &t3, &e3}) {
    if (t->evaluated == 0) continue;
    const bool pass = t->failed == 0;
    all_pass = all_pass && pass;
    out << (pass ? "PASS " : "FAIL ") << t->name << " evaluated=" << t->evaluated
        << " failed=" << t->failed << " max_excess=" << t->worst << '\n';
  }
  return all_pass ? kSuccess : kRuntimeFailure;
}

}  // namespace

void validate(const SweepPlan& plan) {
  if (plan.values.empty()) throw UsageError("sweep needs at least one value");
  for (std::size_t i = 0; i < plan.values.size(); ++i) {
    if (plan.values[i] < 1) throw UsageError("sweep values must be positive");
    if (i > 0 && plan.values[i] <= plan.values[i - 1]) {
      throw UsageError("sweep values must be strictly increasing");
    }
  }
  if (plan.methods.empty()) throw UsageError("sweep needs at least one method");
  if (plan.trials < 1) throw UsageError("--trials must be at least 1");
  if (plan.jobs < 1) throw UsageError("--jobs must be at least 1");
  if (plan.matrix && plan.axis != SweepAxis::beta) {
    throw UsageError("--matrix sweeps support the beta axis only");
  }
  if (!plan.matrix) {
    if (plan.axis != SweepAxis::m && plan.m < 1) throw UsageError("sweep needs --m");
    if (plan.axis != SweepAxis::n && plan.n < 1) throw UsageError("sweep needs --n");
  }
  if (plan.axis != SweepAxis::beta && plan.beta < 1) throw UsageError("sweep needs --beta");
}

std::vector<RunRecord> run_sweep(const SweepPlan& plan, std::ostream* progress) {
  validate(plan);
  std::optional<MatrixStore> shared;
  if (plan.matrix) shared = parse_matrix_market(*plan.matrix);

  const std::size_t method_count = plan.methods.size();
  const std::size_t trials = static_cast<std::size_t>(plan.trials);
  std::vector<RunRecord> records(plan.values.size() * trials * method_count);
  std::mutex progress_mutex;

  for (const SweepGroup& group : plan_groups(plan)) {
    const std::uint64_t seed = plan.seed_base + static_cast<std::uint64_t>(group.trial);
    LinearSystem system = shared ? system_from_matrix(*shared, seed,
                                                      MatrixMarketSource{plan.matrix->string()})
                                 : generate_gaussian(group.m, group.n, seed);

    struct Job {
      std::size_t value_index;
      Index beta;
      std::size_t method_index;
    };
    std::vector<Job> jobs;
    for (const auto& [v, beta] : group.points) {
      for (std::size_t k = 0; k < method_count; ++k) {
        const PointConfig p = point_config(plan, plan.methods[k], beta, seed);
        validate_for(p.cfg, system.A.rows());
        jobs.push_back({v, beta, k});
      }
    }
    prepare_reference(system);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
      while (true) {
        const std::size_t j = next.fetch_add(1);
        if (j >= jobs.size()) return;
        const Job& job = jobs[j];
        const Method method = plan.methods[job.method_index];
        try {
          const PointConfig p = point_config(plan, method, job.beta, seed);
          const SolveReport report = solve(system, p.cfg);
          RunRecord record = make_record(p.cfg, system, p.beta_field, seed, group.trial, report);
          if (progress) {
            const std::lock_guard lock(progress_mutex);
            *progress << "run method=" << record.method << " m=" << record.m << " n=" << record.n
                      << " beta=" << record.beta << " trial=" << record.trial
                      << " iterations=" << record.iterations << " cpu_time_s=" << record.cpu_time_s
                      << " termination=" << record.termination << '\n';
          }
          const std::size_t slot =
              (job.value_index * trials + static_cast<std::size_t>(group.trial)) * method_count +
              job.method_index;
          records[slot] = std::move(record);
        } catch (const std::exception& e) {
          const std::lock_guard lock(failure_mutex);
          if (!failure) {
            std::ostringstream msg;
            msg << "run method=" << to_string(method) << " m=" << system.A.rows()
                << " n=" << system.A.cols() << " beta=" << job.beta << " trial=" << group.trial
                << " failed: " << e.what();
            failure = std::make_exception_ptr(std::runtime_error(msg.str()));
          }
          next = jobs.size();
        }
      }
    };
    const unsigned threads =
        std::max(1U, std::min<unsigned>(plan.jobs, static_cast<unsigned>(jobs.size())));
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
  }
  return records;
}

std::vector<SweepSummaryRow> summarize(const std::vector<RunRecord>& records, SweepAxis axis) {
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
  };
  std::vector<std::pair<Index, std::string>> order;
  std::map<std::pair<Index, std::string>, std::pair<std::vector<double>, std::vector<double>>> by_key;
  for (const auto& r : records) {
    const Index value = axis == SweepAxis::beta ? r.beta : axis == SweepAxis::m ? r.m : r.n;
    const auto key = std::make_pair(value, r.method);
    if (!by_key.contains(key)) order.push_back(key);
    by_key[key].first.push_back(static_cast<double>(r.iterations));
    by_key[key].second.push_back(r.cpu_time_s);
  }
  std::vector<SweepSummaryRow> out;
  for (const auto& key : order) {
    const auto& [iters, times] = by_key[key];
    out.push_back({key.first, key.second, median(iters), median(times),
                   static_cast<Index>(iters.size())});
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Row-action solvers for consistent linear systems"};
  app.name(args.empty() ? "bskm" : args.front());
  app.require_subcommand(1);

  SolveOptions solve_opts;
  auto* solve_cmd = app.add_subcommand("solve", "Run one solver on one system");
  const SolveFlags solve_flags = add_solve_options(*solve_cmd, solve_opts);

  SweepOptions sweep_opts;
  auto* sweep_cmd = app.add_subcommand("sweep", "Solve over a parameter grid and write a CSV");
  add_sweep_options(*sweep_cmd, sweep_opts);

  VerifyOptions verify_opts;
  auto* verify_cmd =
      app.add_subcommand("verify-bounds", "Check the block convergence bounds by enumeration");
  verify_cmd->add_option("--m", verify_opts.m, "Rows")->capture_default_str();
  verify_cmd->add_option("--n", verify_opts.n, "Columns")->capture_default_str();
  verify_cmd->add_option("--beta", verify_opts.beta, "BSKM1 sample size");
  verify_cmd->add_option("--eta", verify_opts.eta, "BSKM2 sub-sample count");
  verify_cmd->add_option("--beta-j", verify_opts.beta_j, "BSKM2 sub-sample size");
  verify_cmd->add_option("--seeds", verify_opts.seeds, "Random systems to check")
      ->capture_default_str();
  verify_cmd->add_option("--seed-base", verify_opts.seed_base, "First seed")
      ->capture_default_str();
  verify_cmd->add_option("--steps", verify_opts.steps,
                         "Also check the iterates of this many solver steps");
  verify_cmd->add_flag("--per-sample", verify_opts.per_sample, "Print every sample's lhs/rhs");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (solve_cmd->parsed()) return do_solve(solve_opts, solve_flags, out);
    if (verify_cmd->parsed()) return do_verify(verify_opts, out);
    const SweepPlan plan = to_plan(sweep_opts);
    const auto records = run_sweep(plan, sweep_opts.quiet ? nullptr : &err);
    write_csv(records, plan.output);
    out << std::setw(10) << sweep_opts.axis << std::setw(10) << "method" << std::setw(20)
        << "median_iterations" << std::setw(20) << "median_cpu_time_s" << std::setw(6) << "runs"
        << '\n';
    for (const auto& row : summarize(records, plan.axis)) {
      out << std::setw(10) << row.value << std::setw(10) << row.method << std::setw(20)
          << row.median_iterations << std::setw(20) << row.median_cpu_time_s << std::setw(6)
          << row.runs << '\n';
    }
    return kSuccess;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const EnumerationLimitExceeded& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
}

}  // namespace bskm::cli
