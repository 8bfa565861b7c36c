#include "spanforest/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "spanforest/analysis.hpp"
#include "spanforest/churn.hpp"
#include "spanforest/csv.hpp"
#include "spanforest/experiments.hpp"

namespace spanforest {

namespace {

constexpr int kUsageError = 2;
constexpr int kInvariantFailure = 3;

std::string_view to_string(Command command) {
  switch (command) {
    case Command::Analyze: return "analyze";
    case Command::Simulate: return "simulate";
    case Command::Figure: return "figure";
  }
  return "unknown";
}

std::string format_rational(const Rational& r) {
  std::ostringstream s;
  s << format_double(to_double(r));
  if (r.denominator() != 1) s << " (" << r.numerator() << '/' << r.denominator() << ')';
  return s.str();
}

std::string format_estimate(const Estimate& e) {
  return format_double(e.mean) + " [" + format_double(e.ci_low) + ", " + format_double(e.ci_high) + "]";
}

// Writes `content` to `path` through a temporary file so a failed run never
// leaves a partial artifact behind.
void write_atomically(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    file << content;
    file.flush();
    if (!file) {
      file.close();
      std::filesystem::remove(tmp);
      throw std::runtime_error("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

void emit(const RunConfig& config, const std::string& content, const nlohmann::ordered_json& summary,
          std::ostream& out) {
  if (config.out.empty()) {
    out << content;
    return;
  }
  const std::filesystem::path path(config.out);
  const nlohmann::ordered_json meta{{"config", to_json(config)}, {"summary", summary}};
  auto sidecar = path;
  sidecar += ".meta.json";
  try {
    write_atomically(path, content);
    write_atomically(sidecar, meta.dump(2) + "\n");
  } catch (...) {
    std::error_code ignored;
    std::filesystem::remove(path, ignored);
    std::filesystem::remove(sidecar, ignored);
    throw;
  }
}

int run_analyze(const RunConfig& config, std::ostream& out) {
  const auto instance = generate_instance(config.n1, config.n2, config.k, config.seed.value_or(0));
  const auto p = fusion_probability_exact(instance.tree1, instance.tree2, instance.bridges);
  out << "fusion_probability = " << format_rational(p) << '\n';
  if (const auto e = expected_fusion_time_exact(instance.tree1, instance.tree2, instance.bridges)) {
    out << "expected_fusion_time = " << format_rational(*e) << '\n';
  } else {
    out << "expected_fusion_time = inf\n";
    return 0;
  }
  if (config.n1 * config.n2 <= 10'000) {
    const auto stationary = exact_first_meeting_stationary(instance.tree1, instance.tree2, instance.bridges,
                                                            ActivationDiscipline::Interleaved, config.policy);
    const auto from_starts =
        exact_first_meeting(instance.tree1, instance.tree2, instance.bridges, instance.start1, instance.start2,
                            ActivationDiscipline::Interleaved, config.policy);
    out << "first_meeting_stationary = " << format_double(stationary) << '\n';
    out << "first_meeting_from_starts = " << format_double(from_starts) << '\n';
  }
  return 0;
}

int run_meeting(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const Scenario scenario{config.n1, config.n2, config.k, *config.seed, {}};
  MeetingOptions options;
  options.runs = config.runs.value_or(100);
  options.min_intervals = config.intervals.value_or(100);
  const auto summary = measure_meeting(scenario, config.policy, options);

  CsvTable table({"run", "first_meeting_moves", "first_meeting_rounds", "inter_meeting_mean", "intervals",
                  "expected_fusion_time", "invariants_ok"});
  for (std::size_t r = 0; r < summary.runs.size(); ++r) {
    const auto& run = summary.runs[r];
    table.add_row({std::to_string(r), std::to_string(run.first_meeting_moves),
                   std::to_string(run.first_meeting_rounds), format_double(run.inter_meeting_mean()),
                   std::to_string(run.inter_meeting_moves.size()), format_double(run.fusion_time),
                   run.invariants_ok ? "1" : "0"});
  }
  nlohmann::ordered_json json{{"first_meeting", summary.first_meeting.mean},
                              {"inter_meeting", summary.inter_meeting->mean},
                              {"eq3_pooled", summary.pooled_fusion_time},
                              {"invariant_failures", summary.invariant_failures}};
  emit(config, table.str(), json, out);
  err << "first_meeting = " << format_estimate(summary.first_meeting)
            << "  inter_meeting = " << format_estimate(*summary.inter_meeting)
            << "  eq3_pooled = " << format_double(summary.pooled_fusion_time)
            << "  invariant_failures = " << summary.invariant_failures << '\n';
  return summary.invariant_failures == 0 ? 0 : kInvariantFailure;
}

int run_churn(const RunConfig& config, std::ostream& out, std::ostream& err) {
  std::ifstream file(config.churn);
  if (!file) throw std::runtime_error("cannot open churn schedule " + config.churn);
  const auto schedule = read_event_log(file);
  const auto instance = generate_instance(config.n1, config.n2, config.k, derive_seed(*config.seed, 0));
  World world = instance.build_world();
  Rng rng(derive_seed(*config.seed, 1));
  ChurnOptions options;
  options.policy = config.policy;
  options.rounds = config.steps.value_or(1000);
  const auto trace = churn_driver(world, schedule, options, rng);

  std::ostringstream jsonl;
  write_churn_trace(jsonl, trace);
  const auto& last = trace.samples.back();
  nlohmann::ordered_json json{{"rounds", trace.rounds},
                              {"moves", trace.moves},
                              {"tokens", last.tokens},
                              {"components", last.components},
                              {"quiescent", trace.quiescent},
                              {"violations", trace.violations}};
  emit(config, jsonl.str(), json, out);
  err << "rounds = " << trace.rounds << "  tokens = " << last.tokens << "  components = " << last.components
            << "  violations = " << trace.violations.size() << '\n';
  for (const auto& v : trace.violations) err << "  " << v << '\n';
  return trace.violations.empty() ? 0 : kInvariantFailure;
}

int run_figure_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  auto params = default_params(*config.id);
  if (config.runs) params.runs = *config.runs;
  if (config.intervals) params.intervals = *config.intervals;
  if (config.steps) params.steps = *config.steps;
  if (config.n_given) {
    params.n = config.n1;
    if (!params.sizes.empty()) params.sizes = {config.n1};
  }
  if (config.k_given && !params.ks.empty()) params.ks = {config.k};
  const auto result = run_figure(*config.id, params, *config.seed);
  emit(config, result.table.str(), result.summary, out);
  err << to_string(*config.id) << ": " << result.table.rows().size() << " rows"
            << (config.out.empty() ? "" : " written to " + config.out) << '\n';
  return result.invariants_ok ? 0 : kInvariantFailure;
}

}  // namespace

nlohmann::ordered_json to_json(const RunConfig& config) {
  nlohmann::ordered_json j;
  j["command"] = to_string(config.command);
  j["n1"] = config.n1;
  j["n2"] = config.n2;
  j["k"] = config.k;
  j["policy"] = to_string(config.policy);
  j["runs"] = config.runs ? nlohmann::ordered_json(*config.runs) : nlohmann::ordered_json();
  j["steps"] = config.steps ? nlohmann::ordered_json(*config.steps) : nlohmann::ordered_json();
  j["intervals"] = config.intervals ? nlohmann::ordered_json(*config.intervals) : nlohmann::ordered_json();
  j["seed"] = config.seed ? nlohmann::ordered_json(*config.seed) : nlohmann::ordered_json();
  j["out"] = config.out;
  j["id"] = config.id ? nlohmann::ordered_json(to_string(*config.id)) : nlohmann::ordered_json();
  j["churn"] = config.churn;
  return j;
}

std::variant<RunConfig, int> parse_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Token random-walk spanning forest simulator"};
  app.require_subcommand(1);
  RunConfig config;
  std::string policy = "uniform";
  std::string id;
  std::uint64_t runs = 0;
  std::uint64_t steps = 0;
  std::uint64_t intervals = 0;
  std::uint64_t seed = 0;

  auto* analyze = app.add_subcommand("analyze", "Closed-form fusion probability and expected fusion time");
  auto* simulate = app.add_subcommand("simulate", "Meeting-time measurement, or a churn run with --churn");
  auto* figure = app.add_subcommand("figure", "Reproduce one figure experiment as CSV");

  for (auto* sub : {analyze, simulate, figure}) {
    sub->add_option("--n1", config.n1, "Size of the first tree")->check(CLI::Range(std::size_t{1}, std::size_t{1} << 20));
    sub->add_option("--n2", config.n2, "Size of the second tree")->check(CLI::Range(std::size_t{1}, std::size_t{1} << 20));
    sub->add_option("--k", config.k, "Number of bridges")->check(CLI::NonNegativeNumber);
    sub->add_option("--policy", policy, "Walk policy")->check(CLI::IsMember({"uniform", "nobacktrack"}));
    auto* seed_opt = sub->add_option("--seed", seed, "64-bit seed");
    if (sub != analyze) {
      seed_opt->required();
      sub->add_option("--runs", runs, "Independent runs")->check(CLI::PositiveNumber);
      sub->add_option("--steps", steps, "Walk moves (figures) or rounds (churn)")->check(CLI::PositiveNumber);
      sub->add_option("--intervals", intervals, "Inter-meeting intervals per run")->check(CLI::PositiveNumber);
      sub->add_option("--out", config.out, "Output path (stdout when omitted)");
    }
  }
  simulate->add_option("--churn", config.churn, "JSON-lines topology schedule")->check(CLI::ExistingFile);
  figure->add_option("--id", id, "Figure id")->required()->check(CLI::IsMember({"fig2a", "fig2b", "fig2c", "fig3a", "fig3b"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  CLI::App* chosen = analyze;
  if (simulate->parsed()) {
    config.command = Command::Simulate;
    chosen = simulate;
  } else if (figure->parsed()) {
    config.command = Command::Figure;
    chosen = figure;
  }
  config.policy = *parse_walk_policy(policy);
  config.k_given = chosen->count("--k") > 0;
  config.n_given = chosen->count("--n1") > 0;
  if (chosen->count("--seed") > 0) config.seed = seed;
  if (chosen != analyze) {
    if (chosen->count("--runs") > 0) config.runs = runs;
    if (chosen->count("--steps") > 0) config.steps = steps;
    if (chosen->count("--intervals") > 0) config.intervals = intervals;
  }
  if (!id.empty()) config.id = parse_figure_id(id);

  auto fail = [&](const std::string& message) {
    err << "error: " << message << '\n';
    return kUsageError;
  };
  if (config.command != Command::Figure) {
    if (config.n1 < 2 || config.n2 < 2) return fail("--n1 and --n2 must be at least 2");
    if (config.k > config.n1 * config.n2) return fail("--k exceeds the number of cross pairs n1*n2");
  }
  if (config.command == Command::Simulate && config.churn.empty() && config.k == 0) {
    return fail("meeting measurement needs at least one bridge (--k >= 1)");
  }
  if (config.command == Command::Figure) {
    if (config.n_given && config.n1 < 2) return fail("--n1 must be at least 2");
    if (config.k_given && config.k == 0) return fail("figures need at least one bridge");
  }
  return config;
}

int execute(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    switch (config.command) {
      case Command::Analyze: return run_analyze(config, out);
      case Command::Simulate: return config.churn.empty() ? run_meeting(config, out, err) : run_churn(config, out, err);
      case Command::Figure: return run_figure_command(config, out, err);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return 1;
}

int run_cli(int argc, const char* const* argv) {
  const auto parsed = parse_args(argc, argv, std::cout, std::cerr);
  if (const auto* code = std::get_if<int>(&parsed)) return *code;
  return execute(std::get<RunConfig>(parsed), std::cout, std::cerr);
}

}  // namespace spanforest
