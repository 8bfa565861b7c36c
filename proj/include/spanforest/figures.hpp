#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "spanforest/csv.hpp"
#include "spanforest/experiments.hpp"

namespace spanforest {

enum class FigureId : std::uint8_t { Fig2a, Fig2b, Fig2c, Fig3a, Fig3b };

std::string_view to_string(FigureId id);
std::optional<FigureId> parse_figure_id(std::string_view text);

struct FigureParams {
  std::vector<std::size_t> sizes;  // fig2a tree sizes
  std::vector<std::size_t> ks;     // fig2b/fig3b bridge counts
  std::size_t n = 50;              // tree size for fig2b/2c/3a/3b
  std::size_t runs = 0;            // runs per k, or instances per n for fig2a
  std::size_t intervals = 0;       // inter-meeting intervals collected per run
  std::uint64_t steps = 0;         // walk length for fig2c/fig3a
};

FigureParams default_params(FigureId id);

/// Bridge count used for fig2a instances of size n.
std::size_t fig2a_bridges(std::size_t n);

struct InstanceComparison {
  double analytic = 0.0;   // closed-form expected fusion time
  double simulated = 0.0;  // mean inter-meeting moves
  [[nodiscard]] double relative_error() const;
};

/// fig2a measurement: `instances` pairs of independent uniform random n-vertex
/// trees with fig2a_bridges(n) bridges; per instance, one long run collecting
/// `intervals` inter-meeting intervals after burn-in.
std::vector<InstanceComparison> analytic_vs_simulated(std::size_t n, std::size_t instances, std::size_t intervals,
                                                      std::uint64_t seed);

struct FigureResult {
  CsvTable table;
  nlohmann::ordered_json summary;
  bool invariants_ok = true;
};

FigureResult run_figure(FigureId id, const FigureParams& params, std::uint64_t seed);

}  // namespace spanforest
