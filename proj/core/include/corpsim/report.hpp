#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace corpsim {

std::string tool_version();

/// A numeric report cell and the provenance entry that produced it (0 = none).
struct Cell {
  std::optional<double> value;
  std::size_t prov = 0;
};

struct ReportRow {
  std::string table;
  std::vector<std::pair<std::string, std::string>> labels;
  std::vector<std::pair<std::string, Cell>> values;
};

/// One logged operation call with the hashes and parameters of its inputs.
struct ProvenanceEntry {
  std::size_t id = 0;
  std::string op;
  nlohmann::json inputs;
};

struct ChartSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<ChartSeries> series;
};

class Report {
 public:
  std::string experiment;
  std::string version = tool_version();
  std::uint64_t seed = 0;
  std::string grid;
  nlohmann::json config = nlohmann::json::object();
  std::vector<ReportRow> rows;
  std::vector<Chart> charts;
  std::vector<ProvenanceEntry> provenance;
  std::vector<std::string> warnings;

  /// Records an operation call and returns its provenance id (1-based).
  std::size_t log(std::string op, nlohmann::json inputs);

  nlohmann::json to_json() const;
  /// Throws FormatError on a malformed document.
  static Report from_json(const nlohmann::json& j);

  /// One CSV block per table, blocks separated by a blank line.
  std::string to_csv() const;
  /// Standalone SVG with every chart stacked vertically.
  std::string to_svg() const;
};

/// Renders a single line chart as a standalone SVG document.
std::string render_svg(const std::vector<Chart>& charts);

}  // namespace corpsim
