#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "nhmf/cli/config.hpp"

namespace nhmf::cli {

using Cell = std::variant<double, std::int64_t, std::string>;

/// Row-oriented result set. CSV, JSON and SVG are all rendered from it.
struct Table {
  std::string command;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::map<std::string, std::string> metadata;  // emitted as header comments / object

  std::size_t column(const std::string& name) const;
};

/// Shortest-round-trip-safe decimal (17 significant digits), locale free.
std::string format_double(double x);

void write_csv(std::ostream& os, const Table& t, const RunConfig& cfg);
void write_json(std::ostream& os, const Table& t, const RunConfig& cfg);

/// Writes to cfg.out (or stdout when empty) in cfg.format.
void emit_table(const Table& t, const RunConfig& cfg);

/// Document wrapper shared by every JSON artifact.
nlohmann::json artifact_header(const std::string& command, const RunConfig& cfg);

void write_text_file(const std::string& path, const std::string& text);

struct PlotSpec {
  std::string title;
  std::string x_column;
  std::vector<std::string> y_columns;  // one series each, or
  std::string y_column;                // a single column split by
  std::string group_column;            // the values of this column
  std::string x_label, y_label;
};

/// Line plot of table columns as a standalone SVG document.
std::string render_svg(const Table& t, const PlotSpec& spec);

/// out path with its extension replaced (out.csv -> out<suffix>.svg).
std::string plot_path(const std::string& out, const std::string& suffix = "");

}  // namespace nhmf::cli
