#include "corpsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "corpsim/errors.hpp"

#ifndef CORPSIM_VERSION
#define CORPSIM_VERSION "0.0.0"
#endif

namespace corpsim {

std::string tool_version() { return CORPSIM_VERSION; }

std::size_t Report::log(std::string op, nlohmann::json inputs) {
  const std::size_t id = provenance.size() + 1;
  provenance.push_back(ProvenanceEntry{id, std::move(op), std::move(inputs)});
  return id;
}

nlohmann::json Report::to_json() const {
  nlohmann::json jrows = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json labels = nlohmann::json::array();
    for (const auto& [k, v] : r.labels) labels.push_back({k, v});
    nlohmann::json values = nlohmann::json::array();
    for (const auto& [k, c] : r.values) {
      values.push_back({k, c.value ? nlohmann::json(*c.value) : nlohmann::json(nullptr), c.prov});
    }
    jrows.push_back({{"table", r.table}, {"labels", labels}, {"values", values}});
  }
  nlohmann::json jcharts = nlohmann::json::array();
  for (const auto& c : charts) {
    nlohmann::json series = nlohmann::json::array();
    for (const auto& s : c.series) series.push_back({{"name", s.name}, {"points", s.points}});
    jcharts.push_back({{"title", c.title}, {"x_label", c.x_label}, {"y_label", c.y_label}, {"series", series}});
  }
  nlohmann::json jprov = nlohmann::json::array();
  for (const auto& p : provenance) jprov.push_back({{"id", p.id}, {"op", p.op}, {"inputs", p.inputs}});
  return nlohmann::json{{"experiment", experiment}, {"tool_version", version}, {"seed", seed},
                        {"grid", grid},             {"config", config},        {"rows", jrows},
                        {"charts", jcharts},        {"provenance", jprov},     {"warnings", warnings}};
}

Report Report::from_json(const nlohmann::json& j) {
  try {
    Report r;
    r.experiment = j.at("experiment").get<std::string>();
    r.version = j.at("tool_version").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.grid = j.value("grid", std::string{});
    r.config = j.value("config", nlohmann::json::object());
    for (const auto& jr : j.at("rows")) {
      ReportRow row;
      row.table = jr.at("table").get<std::string>();
      for (const auto& l : jr.at("labels")) row.labels.emplace_back(l.at(0).get<std::string>(), l.at(1).get<std::string>());
      for (const auto& v : jr.at("values")) {
        Cell c;
        if (!v.at(1).is_null()) c.value = v.at(1).get<double>();
        c.prov = v.at(2).get<std::size_t>();
        row.values.emplace_back(v.at(0).get<std::string>(), c);
      }
      r.rows.push_back(std::move(row));
    }
    for (const auto& jc : j.value("charts", nlohmann::json::array())) {
      Chart c{jc.at("title").get<std::string>(), jc.at("x_label").get<std::string>(),
              jc.at("y_label").get<std::string>(), {}};
      for (const auto& js : jc.at("series")) {
        c.series.push_back(ChartSeries{js.at("name").get<std::string>(),
                                       js.at("points").get<std::vector<std::pair<double, double>>>()});
      }
      r.charts.push_back(std::move(c));
    }
    for (const auto& jp : j.value("provenance", nlohmann::json::array())) {
      r.provenance.push_back(
          ProvenanceEntry{jp.at("id").get<std::size_t>(), jp.at("op").get<std::string>(), jp.at("inputs")});
    }
    r.warnings = j.value("warnings", std::vector<std::string>{});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed report: ") + e.what());
  }
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string Report::to_csv() const {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const ReportRow*>> by_table;
  for (const auto& r : rows) {
    if (!by_table.contains(r.table)) order.push_back(r.table);
    by_table[r.table].push_back(&r);
  }
  std::string out;
  for (std::size_t t = 0; t < order.size(); ++t) {
    const auto& table_rows = by_table[order[t]];
    if (t) out += '\n';
    const ReportRow& first = *table_rows.front();
    out += "table";
    for (const auto& [k, v] : first.labels) out += "," + csv_field(k);
    for (const auto& [k, c] : first.values) out += "," + csv_field(k);
    out += '\n';
    for (const auto* r : table_rows) {
      out += csv_field(r->table);
      for (const auto& [k, v] : r->labels) out += "," + csv_field(v);
      for (const auto& [k, c] : r->values) out += "," + (c.value ? format_number(*c.value) : std::string{});
      out += '\n';
    }
  }
  return out;
}

std::string Report::to_svg() const { return render_svg(charts); }

std::string render_svg(const std::vector<Chart>& charts) {
  constexpr double kWidth = 720, kHeight = 420, kLeft = 80, kRight = 170, kTop = 50, kBottom = 60;
  static const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                   "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  const double total_height = kHeight * static_cast<double>(std::max<std::size_t>(charts.size(), 1));
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                "font-family=\"sans-serif\" font-size=\"12\">\n",
                kWidth, total_height);
  out += buf;
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t ci = 0; ci < charts.size(); ++ci) {
    const Chart& c = charts[ci];
    const double y0 = kHeight * static_cast<double>(ci);
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& s : c.series) {
      for (const auto& [x, y] : s.points) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
    if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (xmax == xmin) xmin -= 0.5, xmax += 0.5;
    if (ymax == ymin) ymin -= 0.5, ymax += 0.5;
    const double ypad = (ymax - ymin) * 0.05;
    ymin -= ypad;
    ymax += ypad;
    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return y0 + kTop + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"15\" text-anchor=\"middle\">",
                  kLeft + pw / 2, y0 + 28);
    out += buf + xml_escape(c.title) + "</text>\n";
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"#333\"/>\n",
                  kLeft, y0 + kTop, pw, ph);
    out += buf;
    for (int i = 0; i <= 4; ++i) {
      const double fx = xmin + (xmax - xmin) * i / 4.0;
      const double fy = ymin + (ymax - ymin) * i / 4.0;
      std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%.4g</text>\n", px(fx),
                    y0 + kTop + ph + 18, fx);
      out += buf;
      std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.4g</text>\n", kLeft - 6,
                    py(fy) + 4, fy);
      out += buf;
      std::snprintf(buf, sizeof buf,
                    "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ddd\"/>\n", kLeft, py(fy),
                    kLeft + pw, py(fy));
      out += buf;
    }
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">", kLeft + pw / 2,
                  y0 + kHeight - 18);
    out += buf + xml_escape(c.x_label) + "</text>\n";
    std::snprintf(buf, sizeof buf,
                  "<text x=\"18\" y=\"%.1f\" text-anchor=\"middle\" transform=\"rotate(-90 18 %.1f)\">",
                  y0 + kTop + ph / 2, y0 + kTop + ph / 2);
    out += buf + xml_escape(c.y_label) + "</text>\n";

    for (std::size_t si = 0; si < c.series.size(); ++si) {
      const auto& s = c.series[si];
      const char* color = kPalette[si % std::size(kPalette)];
      out += "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"";
      out += color;
      out += "\" points=\"";
      for (std::size_t k = 0; k < s.points.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%s%.1f,%.1f", k ? " " : "", px(s.points[k].first), py(s.points[k].second));
        out += buf;
      }
      out += "\"/>\n";
      for (const auto& [x, y] : s.points) {
        std::snprintf(buf, sizeof buf, "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"3\" fill=\"%s\"/>\n", px(x), py(y), color);
        out += buf;
      }
      const double ly = y0 + kTop + 10 + 18.0 * static_cast<double>(si);
      std::snprintf(buf, sizeof buf,
                    "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" stroke-width=\"2\"/>\n",
                    kLeft + pw + 12, ly, kLeft + pw + 32, ly, color);
      out += buf;
      std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\">", kLeft + pw + 38, ly + 4);
      out += buf + xml_escape(s.name) + "</text>\n";
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace corpsim
