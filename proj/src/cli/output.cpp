#include "nhmf/cli/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace nhmf::cli {

using nlohmann::json;

std::size_t Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw Error("table has no column " + name);
  return static_cast<std::size_t>(it - columns.begin());
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) x = 0.0;  // drop the sign of negative zero
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return std::isfinite(*d) ? json(*d) : json(nullptr);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  return std::get<std::string>(c);
}

double cell_number(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  return std::nan("");
}

}  // namespace

json artifact_header(const std::string& command, const RunConfig& cfg) {
  return {{"tool", kToolName}, {"version", kToolVersion}, {"command", command}, {"config", cfg.to_json()}};
}

void write_csv(std::ostream& os, const Table& t, const RunConfig& cfg) {
  os << "# tool: " << kToolName << ' ' << kToolVersion << '\n';
  os << "# command: " << t.command << '\n';
  os << "# config: " << cfg.to_json().dump() << '\n';
  for (const auto& [k, v] : t.metadata) os << "# " << k << ": " << v << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
    os << '\n';
  }
}

void write_json(std::ostream& os, const Table& t, const RunConfig& cfg) {
  json doc = artifact_header(t.command, cfg);
  doc["metadata"] = t.metadata;
  doc["columns"] = t.columns;
  json rows = json::array();
  for (const auto& row : t.rows) {
    json r = json::array();
    for (const auto& c : row) r.push_back(cell_json(c));
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  os << doc.dump(2) << '\n';
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << text;
  if (!f) throw IoError("write to " + path + " failed");
}

void emit_table(const Table& t, const RunConfig& cfg) {
  std::ostringstream os;
  if (cfg.format == Format::Csv) write_csv(os, t, cfg);
  else write_json(os, t, cfg);
  if (cfg.out.empty()) std::cout << os.str();
  else write_text_file(cfg.out, os.str());
}

std::string plot_path(const std::string& out, const std::string& suffix) {
  std::string stem = out.empty() ? std::string("nhmf") : out;
  const auto slash = stem.find_last_of('/');
  const auto dot = stem.find_last_of('.');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) stem.erase(dot);
  return stem + suffix + ".svg";
}

namespace {

struct Series {
  std::string name;
  std::vector<double> x, y;
};

double nice_step(double span) {
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0})
    if (raw <= m * mag) return m * mag;
  return 10.0 * mag;
}

std::string escape(const std::string& s) {
  std::string o;
  for (char ch : s) {
    if (ch == '<') o += "&lt;";
    else if (ch == '>') o += "&gt;";
    else if (ch == '&') o += "&amp;";
    else o += ch;
  }
  return o;
}

std::string num(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

std::string tick(double x) {
  if (std::abs(x) < 1e-12) x = 0.0;
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string render_svg(const Table& t, const PlotSpec& spec) {
  std::vector<Series> series;
  const std::size_t xc = t.column(spec.x_column);
  if (!spec.group_column.empty()) {
    const std::size_t yc = t.column(spec.y_column), gc = t.column(spec.group_column);
    std::map<std::string, std::size_t> index;
    for (const auto& row : t.rows) {
      const std::string g = cell_text(row[gc]);
      auto [it, fresh] = index.emplace(g, series.size());
      if (fresh) series.push_back({spec.group_column == "curve_label" ? g : spec.group_column + " " + g, {}, {}});
      series[it->second].x.push_back(cell_number(row[xc]));
      series[it->second].y.push_back(cell_number(row[yc]));
    }
  } else {
    for (const auto& name : spec.y_columns) {
      const std::size_t yc = t.column(name);
      Series s{name, {}, {}};
      for (const auto& row : t.rows) {
        s.x.push_back(cell_number(row[xc]));
        s.y.push_back(cell_number(row[yc]));
      }
      series.push_back(std::move(s));
    }
  }

  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]), x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]), y1 = std::max(y1, s.y[i]);
    }
  if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad, y1 += pad;

  const double W = 860, H = 520, L = 70, R = 180, T = 40, B = 55;
  const double pw = W - L - R, ph = H - T - B;
  auto sx = [&](double x) { return L + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return T + (y1 - y) / (y1 - y0) * ph; };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(W) << "\" height=\"" << num(H)
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(L) << "\" y=\"24\" font-size=\"15\">" << escape(spec.title) << "</text>\n";
  o << "<rect x=\"" << num(L) << "\" y=\"" << num(T) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
    << "\" fill=\"none\" stroke=\"black\"/>\n";

  const double xs = nice_step(x1 - x0), ys = nice_step(y1 - y0);
  for (double v = std::ceil(x0 / xs) * xs; v <= x1 + 1e-9 * xs; v += xs)
    o << "<line x1=\"" << num(sx(v)) << "\" y1=\"" << num(T + ph) << "\" x2=\"" << num(sx(v)) << "\" y2=\""
      << num(T + ph + 5) << "\" stroke=\"black\"/><text x=\"" << num(sx(v)) << "\" y=\"" << num(T + ph + 18)
      << "\" text-anchor=\"middle\">" << tick(std::round(v / xs) * xs) << "</text>\n";
  for (double v = std::ceil(y0 / ys) * ys; v <= y1 + 1e-9 * ys; v += ys)
    o << "<line x1=\"" << num(L - 5) << "\" y1=\"" << num(sy(v)) << "\" x2=\"" << num(L) << "\" y2=\""
      << num(sy(v)) << "\" stroke=\"black\"/><text x=\"" << num(L - 8) << "\" y=\"" << num(sy(v) + 4)
      << "\" text-anchor=\"end\">" << tick(std::round(v / ys) * ys) << "</text>\n";
  o << "<text x=\"" << num(L + pw / 2) << "\" y=\"" << num(H - 12) << "\" text-anchor=\"middle\">"
    << escape(spec.x_label) << "</text>\n";
  o << "<text x=\"18\" y=\"" << num(T + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << num(T + ph / 2) << ")\">" << escape(spec.y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* colour = palette[k % 10];
    std::string pts;
    auto flush = [&] {
      if (!pts.empty())
        o << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"" << pts
          << "\"/>\n";
      pts.clear();
    };
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        flush();
        continue;
      }
      pts += num(sx(s.x[i])) + "," + num(sy(s.y[i])) + " ";
    }
    flush();
    const double ly = T + 14 + 16 * static_cast<double>(k);
    o << "<line x1=\"" << num(W - R + 12) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(W - R + 32)
      << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/><text x=\""
      << num(W - R + 38) << "\" y=\"" << num(ly) << "\">" << escape(s.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace nhmf::cli
