#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "tgflock/dynamics.hpp"
#include "tgflock/graph.hpp"

namespace tgflock {

/// Shortest decimal text that round-trips to the same double.
[[nodiscard]] std::string format_double(double value);

/// {"n": N, "weights": [[...], ...]}
[[nodiscard]] std::string graph_to_json(const WeightedDigraph& g);
[[nodiscard]] WeightedDigraph graph_from_json(std::string_view text);

/// Header "i,j,w" then one line per present edge, 0-based. Without `n` the
/// vertex count is the largest index plus one.
[[nodiscard]] std::string graph_to_edge_csv(const WeightedDigraph& g);
[[nodiscard]] WeightedDigraph graph_from_edge_csv(std::string_view text, std::optional<std::size_t> n = std::nullopt);

/// Columns t,value.
[[nodiscard]] std::string metric_series_csv(const MetricSeries& series);

[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
[[nodiscard]] std::string sha256_hex(std::string_view content);

}  // namespace tgflock
