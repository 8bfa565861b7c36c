// Acceptance runner. `spanforest_acceptance` runs every criterion,
// `spanforest_acceptance N` only criterion N. One PASS/FAIL line each; the
// exit code is nonzero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spanforest/analysis.hpp"
#include "spanforest/churn.hpp"
#include "spanforest/cli.hpp"
#include "spanforest/experiments.hpp"
#include "spanforest/figures.hpp"
#include "spanforest/forest.hpp"
#include "spanforest/protocol.hpp"
#include "spanforest/random.hpp"

using namespace spanforest;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

// 1. Occupancy of a uniform walk converges to d(v) / 2(n-1).
Outcome stationary_law() {
  constexpr std::size_t trees = 20;
  constexpr std::uint64_t moves = 1'000'000;
  double max_tv = 0.0;
  double sum_tv = 0.0;
  std::size_t under = 0;
  for (std::size_t i = 0; i < trees; ++i) {
    Rng rng(derive_seed(kSeed, i));
    const auto tree = random_tree(50, rng);
    const auto start = tree.vertices()[uniform_index(rng, tree.size())];
    const auto trace = visit_trace(tree, WalkPolicy::Uniform, moves, start, start, derive_seed(kSeed + 1, i));
    double tv = 0.0;
    for (const auto v : tree.vertices()) {
      const double expected = static_cast<double>(tree.degree(v)) / (2.0 * static_cast<double>(tree.size() - 1));
      tv += std::abs(static_cast<double>(trace.occupancy[v.value]) / static_cast<double>(moves) - expected);
    }
    tv /= 2.0;
    max_tv = std::max(max_tv, tv);
    sum_tv += tv;
    if (tv < 0.01) ++under;
  }
  return {under == trees, fmt("trees=%zu moves=%llu tv<0.01 on %zu/%zu, max_tv=%.5f mean_tv=%.5f", trees,
                              static_cast<unsigned long long>(moves), under, trees, max_tv, sum_tv / trees)};
}

// 2. Closed-form fusion time against simulated inter-meeting means.
Outcome fusion_time_agreement() {
  bool pass = true;
  std::string detail;
  for (const std::size_t n : {10u, 50u, 100u, 200u}) {
    const auto rows = analytic_vs_simulated(n, 100, 5000, derive_seed(kSeed, n));
    std::size_t within = 0;
    double err = 0.0;
    for (const auto& row : rows) {
      within += row.relative_error() <= 0.10 ? 1 : 0;
      err += row.relative_error();
    }
    const double share = static_cast<double>(within) / static_cast<double>(rows.size());
    pass = pass && share >= 0.90;
    detail += fmt("n=%zu k=%zu within10%%=%.2f mean_err=%.3f; ", n, fig2a_bridges(n), share,
                  err / static_cast<double>(rows.size()));
  }
  return {pass, detail};
}

// 3. First meeting from arbitrary starts costs 1.8x to 3.5x the inter-meeting time.
Outcome first_over_inter() {
  bool pass = true;
  std::string detail;
  MeetingOptions options;
  options.runs = 2000;
  options.min_intervals = 100;
  for (const std::size_t k : {1u, 5u, 10u, 20u}) {
    const auto s = measure_meeting({50, 50, k, derive_seed(kSeed, k), {}}, WalkPolicy::Uniform, options);
    const auto& first = s.first_meeting;
    const auto& inter = *s.inter_meeting;
    const double ratio = first.mean / inter.mean;
    pass = pass && ratio >= 1.8 && ratio <= 3.5 && s.invariant_failures == 0;
    detail += fmt("k=%zu first=%.0f[%.0f,%.0f] inter=%.0f[%.0f,%.0f] ratio=%.2f; ", k, first.mean, first.ci_low,
                  first.ci_high, inter.mean, inter.ci_low, inter.ci_high, ratio);
  }
  return {pass, detail};
}

// 4. Non-backtracking walks meet sooner.
Outcome nonbacktracking_speedup() {
  bool pass = true;
  std::string detail;
  MeetingOptions options;
  options.runs = 4000;
  options.measure_recurrence = false;
  for (const std::size_t k : {1u, 5u, 10u, 20u}) {
    const Scenario scenario{50, 50, k, derive_seed(kSeed + 4, k), {}};
    const auto uniform = measure_meeting(scenario, WalkPolicy::Uniform, options);
    const auto nb = measure_meeting(scenario, WalkPolicy::NonBacktracking, options);
    const double ratio = nb.first_meeting.mean / uniform.first_meeting.mean;
    pass = pass && ratio >= 0.5 && ratio <= 0.75;
    detail += fmt("k=%zu uniform=%.0f nobacktrack=%.0f ratio=%.3f; ", k, uniform.first_meeting.mean,
                  nb.first_meeting.mean, ratio);
  }
  return {pass, detail};
}

double mc_first_meeting(const Instance& instance, WalkPolicy policy, std::size_t runs, std::uint64_t seed) {
  MeetingOptions options;
  options.measure_recurrence = false;
  options.check_invariants = false;
  double total = 0.0;
  for (std::size_t r = 0; r < runs; ++r) {
    total += static_cast<double>(simulate_meeting(instance, policy, options, derive_seed(seed, r)).first_meeting_moves);
  }
  return total / static_cast<double>(runs);
}

// 5. Small instances: fusion probability against brute-force enumeration
// (all trees up to 6 vertices, all bridge sets up to 3), and the exact
// first-meeting oracle against Monte Carlo.
Outcome small_instances() {
  std::vector<std::vector<TreeSnapshot>> first(7);
  std::vector<std::vector<TreeSnapshot>> second(7);
  for (std::uint32_t n = 2; n <= 6; ++n) first[n] = oracle::unlabeled_trees(n, 0);

  std::size_t checked = 0;
  std::size_t mismatches = 0;
  for (std::uint32_t n1 = 2; n1 <= 6; ++n1) {
    for (std::uint32_t n2 = 2; n2 <= 6; ++n2) {
      for (const auto& t1 : first[n1]) {
        for (const auto& t2 : oracle::unlabeled_trees(n2, n1)) {
          BridgeSet all;
          for (const auto u : t1.vertices()) {
            for (const auto v : t2.vertices()) all.push_back({u, v});
          }
          const auto check = [&](const BridgeSet& b) {
            ++checked;
            if (!(fusion_probability_exact(t1, t2, b) == oracle::stationary_pair_sum(t1, t2, b))) ++mismatches;
          };
          for (std::size_t i = 0; i < all.size(); ++i) {
            check({all[i]});
            for (std::size_t j = i + 1; j < all.size(); ++j) {
              check({all[i], all[j]});
              for (std::size_t l = j + 1; l < all.size(); ++l) check({all[i], all[j], all[l]});
            }
          }
        }
      }
    }
  }

  constexpr std::size_t samples = 20;
  constexpr std::size_t runs = 100'000;
  double worst = 0.0;
  Rng rng(derive_seed(kSeed, 5));
  for (std::size_t i = 0; i < samples; ++i) {
    const auto n1 = static_cast<std::uint32_t>(2 + uniform_index(rng, 5));
    const auto n2 = static_cast<std::uint32_t>(2 + uniform_index(rng, 5));
    const auto& f1 = first[n1];
    const auto f2 = oracle::unlabeled_trees(n2, n1);
    Instance inst;
    inst.tree1 = f1[uniform_index(rng, f1.size())];
    inst.tree2 = f2[uniform_index(rng, f2.size())];
    inst.bridges = wire_bridges(inst.tree1, inst.tree2, 1 + uniform_index(rng, 3), rng);
    const auto policy = i % 2 == 0 ? WalkPolicy::Uniform : WalkPolicy::NonBacktracking;
    double exact = 0.0;
    do {  // skip starts that already sit on a bridge
      inst.start1 = inst.tree1.vertices()[uniform_index(rng, n1)];
      inst.start2 = inst.tree2.vertices()[uniform_index(rng, n2)];
      exact = exact_first_meeting(inst.tree1, inst.tree2, inst.bridges, inst.start1, inst.start2,
                                  ActivationDiscipline::Interleaved, policy);
    } while (exact == 0.0);
    const double mc = mc_first_meeting(inst, policy, runs, derive_seed(kSeed + 5, i));
    worst = std::max(worst, std::abs(mc - exact) / exact);
  }
  return {mismatches == 0 && worst <= 0.02,
          fmt("enumeration: %zu bridge sets, %zu mismatches; monte carlo: %zu instances x %zu runs, worst rel err=%.4f",
              checked, mismatches, samples, runs, worst)};
}

// 6. Safety under churn, checked against an independent forest oracle after
// every event batch and every round.
Outcome churn_safety() {
  constexpr std::size_t scripts = 1000;
  std::size_t violations = 0;
  std::size_t samples = 0;
  std::size_t events = 0;
  std::string first_violation;
  for (std::size_t i = 0; i < scripts; ++i) {
    Rng rng(derive_seed(kSeed + 6, i));
    auto graph = random_connected_graph(30, uniform_index(rng, 31), rng);
    const auto schedule = random_churn_schedule(graph, 200, 3, rng);
    events += schedule.size();
    World world(std::move(graph));
    ChurnOptions options;
    options.rounds = 300;
    options.policy = i % 2 == 0 ? WalkPolicy::Uniform : WalkPolicy::NonBacktracking;
    options.observer = [&](const World& w, const ChurnSample& sample) {
      ++samples;
      auto found = oracle::forest_violations(w);
      if (w.tokens().size() != oracle::tree_components(w.graph())) found.push_back("tokens differ from trees");
      if (w.tokens().size() < oracle::components(w.graph())) found.push_back("fewer tokens than components");
      if (sample.tokens != w.tokens().size()) found.push_back("sample token count is wrong");
      if (!found.empty() && first_violation.empty()) {
        first_violation = fmt("script %zu tick %llu: %s", i, static_cast<unsigned long long>(sample.tick),
                              found.front().c_str());
      }
      violations += found.size();
    };
    const auto trace = churn_driver(world, schedule, options, rng);
    violations += trace.violations.size();
    if (!trace.violations.empty() && first_violation.empty()) first_violation = trace.violations.front();
  }
  auto detail = fmt("scripts=%zu events=%zu checks=%zu violations=%zu", scripts, events, samples, violations);
  if (!first_violation.empty()) detail += " first: " + first_violation;
  return {violations == 0, detail};
}

// 7. From all-singletons on a static connected graph, one spanning tree forms.
Outcome convergence() {
  constexpr std::size_t runs = 100;
  constexpr std::uint64_t budget = 10'000'000;
  std::size_t converged = 0;
  std::uint64_t worst = 0;
  double total = 0.0;
  for (std::size_t i = 0; i < runs; ++i) {
    Rng rng(derive_seed(kSeed + 7, i));
    World world(random_connected_graph(50, uniform_index(rng, 51), rng));
    const SchedulerOptions options{i % 2 == 0 ? WalkPolicy::Uniform : WalkPolicy::NonBacktracking, true};
    StepReport report;
    std::uint64_t moves = 0;
    while (world.tokens().size() > 1 && moves <= budget) {
      scheduler_step(world, options, rng, report);
      moves += report.moves();
    }
    if (world.tokens().size() == 1 && moves <= budget && oracle::forest_violations(world).empty() &&
        oracle::tree_components(world.graph()) == 1) {
      ++converged;
      worst = std::max(worst, moves);
      total += static_cast<double>(moves);
    }
  }
  return {converged == runs, fmt("runs=%zu converged=%zu max_moves=%llu mean_moves=%.0f", runs, converged,
                                 static_cast<unsigned long long>(worst), converged ? total / converged : 0.0)};
}

// 8. A non-backtracking token on a path sweeps it end to end.
Outcome path_sweep() {
  std::size_t windows = 0;
  std::size_t bad = 0;
  for (const std::size_t n : {3u, 10u, 50u}) {
    const auto tree = path_tree(n);
    for (std::uint32_t start = 0; start < n; ++start) {
      for (std::uint64_t s = 0; s < 5; ++s) {
        World world = world_for_tree(tree, VertexId{start});
        Rng rng(derive_seed(kSeed + 8, n * 1000 + start * 10 + s));
        const std::size_t window = 2 * (n - 1);
        std::vector<std::uint32_t> positions;
        for (std::size_t t = 0; t < 10 * window; ++t) {
          scheduler_step(world, {WalkPolicy::NonBacktracking, true}, rng);
          positions.push_back(world.tokens().front().position.value);
        }
        for (std::size_t w = 0; w + window <= positions.size(); ++w) {
          std::vector<bool> seen(n, false);
          for (std::size_t t = w; t < w + window; ++t) seen[positions[t]] = true;
          ++windows;
          if (std::find(seen.begin(), seen.end(), false) != seen.end()) ++bad;
        }
      }
    }
  }
  return {bad == 0, fmt("paths n in {3,10,50}, windows=%zu uncovered=%zu", windows, bad)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 9. Same seed, same bytes, whatever the worker count.
Outcome determinism() {
  const auto dir = std::filesystem::temp_directory_path() / fmt("spanforest_acceptance_%d", static_cast<int>(::getpid()));
  std::filesystem::create_directories(dir);
  const std::vector<std::vector<std::string>> commands = {
      {"figure", "--id", "fig2a", "--n1", "10", "--runs", "4", "--intervals", "50"},
      {"figure", "--id", "fig2b", "--k", "3", "--runs", "16", "--intervals", "20"},
      {"figure", "--id", "fig2c", "--steps", "5000"},
      {"figure", "--id", "fig3a", "--steps", "5000"},
      {"figure", "--id", "fig3b", "--k", "3", "--runs", "16", "--intervals", "20"},
      {"simulate", "--runs", "12", "--intervals", "20", "--k", "2"},
  };
  std::size_t compared = 0;
  std::size_t differing = 0;
  std::size_t failed = 0;
  std::ostringstream sink;
  for (std::size_t c = 0; c < commands.size(); ++c) {
    std::vector<std::string> outputs;
    for (const char* threads : {"1", "4", "1"}) {
      ::setenv("SPANFOREST_THREADS", threads, 1);
      const auto out = dir / fmt("run_%zu_%zu.csv", c, outputs.size());
      std::vector<std::string> args = {"spanforest"};
      args.insert(args.end(), commands[c].begin(), commands[c].end());
      args.insert(args.end(), {"--seed", "99", "--out", out.string()});
      std::vector<const char*> argv;
      for (const auto& a : args) argv.push_back(a.c_str());
      const auto parsed = parse_args(static_cast<int>(argv.size()), argv.data(), sink, sink);
      if (!std::holds_alternative<RunConfig>(parsed) || execute(std::get<RunConfig>(parsed), sink, sink) != 0) {
        ++failed;
      }
      outputs.push_back(slurp(out));
    }
    ::unsetenv("SPANFOREST_THREADS");
    for (std::size_t i = 1; i < outputs.size(); ++i) {
      ++compared;
      if (outputs[i] != outputs[0] || outputs[0].empty()) ++differing;
    }
  }
  std::filesystem::remove_all(dir);
  return {failed == 0 && differing == 0,
          fmt("commands=%zu comparisons=%zu differing=%zu failed_runs=%zu (threads 1,4,1)", commands.size(), compared,
              differing, failed)};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {"stationary-occupancy", stationary_law},   {"fusion-time-agreement", fusion_time_agreement},
      {"first-vs-inter-meeting", first_over_inter}, {"nonbacktracking-speedup", nonbacktracking_speedup},
      {"small-instance-oracles", small_instances}, {"churn-safety", churn_safety},
      {"convergence", convergence},               {"path-sweep", path_sweep},
      {"determinism", determinism},
  };
  std::vector<std::size_t> selected;
  for (int i = 1; i < argc; ++i) {
    const auto id = std::strtoul(argv[i], nullptr, 10);
    if (id < 1 || id > criteria.size()) {
      std::cerr << "unknown criterion " << argv[i] << "\n";
      return 2;
    }
    selected.push_back(id - 1);
  }
  if (selected.empty()) {
    for (std::size_t i = 0; i < criteria.size(); ++i) selected.push_back(i);
  }

  bool all = true;
  for (const auto i : selected) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (outcome.pass ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].name << ": " << outcome.detail
              << " (" << fmt("%.1f", secs) << "s)" << std::endl;
    all = all && outcome.pass;
  }
  return all ? 0 : 1;
}
