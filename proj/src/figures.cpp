#include "spanforest/figures.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "spanforest/parallel.hpp"

namespace spanforest {

namespace {

std::string fmt(double v) { return format_double(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }

nlohmann::ordered_json estimate_json(const Estimate& e) {
  return {{"mean", e.mean}, {"ci_low", e.ci_low}, {"ci_high", e.ci_high}, {"samples", e.samples}};
}

MeetingOptions meeting_options(const FigureParams& params, bool recurrence) {
  MeetingOptions options;
  options.runs = params.runs;
  options.min_intervals = params.intervals;
  options.measure_recurrence = recurrence;
  return options;
}

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

FigureResult run_fig2a(const FigureParams& params, std::uint64_t seed) {
  require(!params.sizes.empty() && params.runs > 0 && params.intervals > 0, "fig2a needs sizes, runs and intervals");
  FigureResult result{CsvTable({"n", "k", "instances", "analytic_mean", "simulated_mean", "mean_relative_error",
                                "within_10pct"}), {}, true};
  auto rows = nlohmann::ordered_json::array();
  for (const auto n : params.sizes) {
    const auto comparisons = analytic_vs_simulated(n, params.runs, params.intervals, derive_seed(seed, n));
    double analytic = 0.0;
    double simulated = 0.0;
    double error = 0.0;
    std::size_t within = 0;
    for (const auto& c : comparisons) {
      analytic += c.analytic;
      simulated += c.simulated;
      error += c.relative_error();
      if (c.relative_error() <= 0.10) ++within;
    }
    const double count = static_cast<double>(comparisons.size());
    const double fraction = static_cast<double>(within) / count;
    result.table.add_row({fmt(std::uint64_t{n}), fmt(std::uint64_t{fig2a_bridges(n)}),
                          fmt(std::uint64_t{comparisons.size()}), fmt(analytic / count), fmt(simulated / count),
                          fmt(error / count), fmt(fraction)});
    rows.push_back({{"n", n}, {"within_10pct", fraction}});
  }
  result.summary["rows"] = rows;
  return result;
}

FigureResult run_meeting_figure(const FigureParams& params, std::uint64_t seed, bool with_biased) {
  require(!params.ks.empty() && params.runs > 0 && params.intervals > 0 && params.n >= 2,
          "meeting figures need bridge counts, runs, intervals and n >= 2");
  std::vector<std::string> header{"k",          "inter_mean",      "inter_ci_low",     "inter_ci_high",
                                  "first_mean", "first_ci_low",    "first_ci_high",    "first_over_inter",
                                  "eq3_pooled"};
  if (with_biased) {
    for (const auto* h : {"nobacktrack_first_mean", "nobacktrack_first_ci_low", "nobacktrack_first_ci_high",
                          "nobacktrack_over_uniform"}) {
      header.emplace_back(h);
    }
  }
  FigureResult result{CsvTable(std::move(header)), {}, true};
  auto rows = nlohmann::ordered_json::array();
  for (const auto k : params.ks) {
    const Scenario scenario{params.n, params.n, k, derive_seed(seed, k), {}};
    const auto uniform = measure_meeting(scenario, WalkPolicy::Uniform, meeting_options(params, true));
    if (uniform.invariant_failures > 0) result.invariants_ok = false;
    const auto& inter = *uniform.inter_meeting;
    const auto& first = uniform.first_meeting;
    std::vector<std::string> row{fmt(std::uint64_t{k}),   fmt(inter.mean),         fmt(inter.ci_low),
                                 fmt(inter.ci_high),      fmt(first.mean),         fmt(first.ci_low),
                                 fmt(first.ci_high),      fmt(first.mean / inter.mean),
                                 fmt(uniform.pooled_fusion_time)};
    nlohmann::ordered_json summary{{"k", k},
                                   {"inter_meeting", estimate_json(inter)},
                                   {"first_meeting", estimate_json(first)}};
    if (with_biased) {
      const auto biased = measure_meeting(scenario, WalkPolicy::NonBacktracking, meeting_options(params, false));
      if (biased.invariant_failures > 0) result.invariants_ok = false;
      const auto& b = biased.first_meeting;
      row.insert(row.end(), {fmt(b.mean), fmt(b.ci_low), fmt(b.ci_high), fmt(b.mean / first.mean)});
      summary["nobacktrack_first_meeting"] = estimate_json(b);
    }
    result.table.add_row(std::move(row));
    rows.push_back(std::move(summary));
  }
  result.summary["rows"] = rows;
  return result;
}

FigureResult run_visit_figure(const FigureParams& params, std::uint64_t seed, std::span<const WalkPolicy> policies) {
  require(params.n >= 2 && params.steps > 0, "visit figures need n >= 2 and a positive step count");
  FigureResult result{CsvTable({"policy", "n", "target", "degree", "visit", "tick", "gap"}), {}, true};
  auto rows = nlohmann::ordered_json::array();
  for (const auto policy : policies) {
    const auto trace = visit_trace(params.n, policy, params.steps, seed);
    const auto degree = trace.tree.degree(trace.target);
    for (std::size_t i = 0; i < trace.ticks.size(); ++i) {
      const std::uint64_t gap = i == 0 ? 0 : trace.ticks[i] - trace.ticks[i - 1];
      result.table.add_row({std::string(to_string(policy)), fmt(std::uint64_t{params.n}),
                            fmt(std::uint64_t{trace.target.value}), fmt(std::uint64_t{degree}),
                            fmt(std::uint64_t{i}), fmt(trace.ticks[i]), i == 0 ? "" : fmt(gap)});
    }
    const double expected = static_cast<double>(degree) / (2.0 * static_cast<double>(params.n - 1));
    const double observed =
        static_cast<double>(trace.occupancy[trace.target.value]) / static_cast<double>(params.steps);
    rows.push_back({{"policy", to_string(policy)},
                    {"visits", trace.ticks.size()},
                    {"gap_mean", trace.gap_mean()},
                    {"gap_cv", trace.gap_cv()},
                    {"visit_frequency", observed},
                    {"stationary_prob", expected}});
  }
  result.summary["rows"] = rows;
  return result;
}

}  // namespace

std::string_view to_string(FigureId id) {
  switch (id) {
    case FigureId::Fig2a: return "fig2a";
    case FigureId::Fig2b: return "fig2b";
    case FigureId::Fig2c: return "fig2c";
    case FigureId::Fig3a: return "fig3a";
    case FigureId::Fig3b: return "fig3b";
  }
  return "unknown";
}

std::optional<FigureId> parse_figure_id(std::string_view text) {
  for (const auto id : {FigureId::Fig2a, FigureId::Fig2b, FigureId::Fig2c, FigureId::Fig3a, FigureId::Fig3b}) {
    if (to_string(id) == text) return id;
  }
  return std::nullopt;
}

FigureParams default_params(FigureId id) {
  FigureParams params;
  switch (id) {
    case FigureId::Fig2a:
      for (std::size_t n = 10; n <= 200; n += 10) params.sizes.push_back(n);
      params.runs = 100;
      params.intervals = 1000;
      break;
    case FigureId::Fig2b:
    case FigureId::Fig3b:
      for (std::size_t k = 1; k <= 20; ++k) params.ks.push_back(k);
      params.runs = 1000;
      params.intervals = 100;
      break;
    case FigureId::Fig2c:
    case FigureId::Fig3a:
      params.steps = 3000;
      break;
  }
  return params;
}

std::size_t fig2a_bridges(std::size_t n) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(static_cast<double>(n) / 10.0)));
}

double InstanceComparison::relative_error() const { return std::abs(simulated - analytic) / analytic; }

std::vector<InstanceComparison> analytic_vs_simulated(std::size_t n, std::size_t instances, std::size_t intervals,
                                                      std::uint64_t seed) {
  MeetingOptions options;
  options.runs = 1;
  options.min_intervals = intervals;
  std::vector<InstanceComparison> out(instances);
  parallel_for(instances, [&](std::size_t i) {
    const auto s = derive_seed(seed, i);
    const auto instance = generate_instance(n, n, fig2a_bridges(n), derive_seed(s, 0));
    const auto stats = simulate_meeting(instance, WalkPolicy::Uniform, options, derive_seed(s, 1));
    out[i] = {stats.fusion_time, stats.inter_meeting_mean()};
  });
  return out;
}

FigureResult run_figure(FigureId id, const FigureParams& params, std::uint64_t seed) {
  switch (id) {
    case FigureId::Fig2a:
      return run_fig2a(params, seed);
    case FigureId::Fig2b:
      return run_meeting_figure(params, seed, false);
    case FigureId::Fig3b:
      return run_meeting_figure(params, seed, true);
    case FigureId::Fig2c: {
      const WalkPolicy policies[] = {WalkPolicy::Uniform};
      return run_visit_figure(params, seed, policies);
    }
    case FigureId::Fig3a: {
      const WalkPolicy policies[] = {WalkPolicy::Uniform, WalkPolicy::NonBacktracking};
      return run_visit_figure(params, seed, policies);
    }
  }
  throw std::invalid_argument("unknown figure id");
}

}  // namespace spanforest
