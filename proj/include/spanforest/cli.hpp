#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "spanforest/figures.hpp"
#include "spanforest/protocol.hpp"

namespace spanforest {

enum class Command : std::uint8_t { Analyze, Simulate, Figure };

struct RunConfig {
  Command command = Command::Analyze;
  std::size_t n1 = 50;
  std::size_t n2 = 50;
  std::size_t k = 1;
  WalkPolicy policy = WalkPolicy::Uniform;
  std::optional<std::size_t> runs;
  std::optional<std::uint64_t> steps;
  std::optional<std::size_t> intervals;
  std::optional<std::uint64_t> seed;
  std::string out;  // empty: write to stdout
  std::optional<FigureId> id;
  std::string churn;  // path of a JSON-lines topology schedule
  bool k_given = false;
  bool n_given = false;
};

nlohmann::ordered_json to_json(const RunConfig& config);

/// Either a validated configuration or the exit status to return right away
/// (0 for --help, nonzero for usage errors, which are printed to `err`).
std::variant<RunConfig, int> parse_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Runs the command. Returns 0 when everything completed and every invariant
/// check passed. Artifacts are written atomically with a `<out>.meta.json`
/// sidecar holding the configuration and summary.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv);

}  // namespace spanforest
