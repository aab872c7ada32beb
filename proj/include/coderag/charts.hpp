#pragma once

#include "coderag/bench.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace coderag {

struct ChartSeries {
    std::string label;
    std::vector<std::pair<double, double>> points; // (x, y), drawn in order
};

struct LineChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<ChartSeries> series;
};

/// Deterministic SVG line chart with one marker per point. Throws DataError
/// when there is no series or a series has fewer than two points.
std::string render_svg(const LineChart& chart);

/// Writes em_vs_k.svg and prompt_tokens_vs_k.svg from a top-k sweep and
/// em_vs_fraction.svg from a scale sweep (either may be empty, not both).
/// Runs are grouped into one series per strategy. Returns the written paths.
std::vector<std::filesystem::path> emit_charts(const std::filesystem::path& dir,
                                               const std::vector<const RunResult*>& topk_runs,
                                               const std::vector<const RunResult*>& scale_runs);

} // namespace coderag
