#include "asink/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace asink {

const char* const kRunCsvHeader = "t,beta,alpha,cost_inner,l1_p,l1_q,subopt_rounded,bound_thm2";

namespace {

std::string fmt(const char* f, double x) {
  std::array<char, 48> buf{};
  std::snprintf(buf.data(), buf.size(), f, x);
  return buf.data();
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                              "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

struct Axis {
  bool log = true;
  double lo = 0.0;
  double hi = 1.0;

  double map(double v) const { return log ? std::log10(v) : v; }
  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
};

// Extends [lo, hi] to whole decades on a log axis, pads it otherwise.
void settle(Axis& a, double lo, double hi) {
  if (!(lo <= hi)) {
    lo = a.log ? 0.1 : 0.0;
    hi = a.log ? 10.0 : 1.0;
  }
  if (a.log) {
    a.lo = std::floor(std::log10(lo));
    a.hi = std::ceil(std::log10(hi));
    if (a.hi <= a.lo) a.hi = a.lo + 1.0;
  } else {
    const double pad = hi > lo ? 0.05 * (hi - lo) : std::max(1.0, std::abs(lo)) * 0.05;
    a.lo = lo - pad;
    a.hi = hi + pad;
  }
}

std::vector<std::pair<double, std::string>> ticks(const Axis& a) {
  std::vector<std::pair<double, std::string>> out;
  if (a.log) {
    for (double e = a.lo; e <= a.hi + 1e-9; e += 1.0) out.emplace_back(e, fmt("1e%g", e));
  } else {
    for (int k = 0; k <= 5; ++k) {
      const double v = a.lo + (a.hi - a.lo) * k / 5.0;
      out.emplace_back(v, fmt("%.3g", v));
    }
  }
  return out;
}

}  // namespace

std::string format_cell(std::optional<double> x) {
  if (!x) return {};
  return fmt("%.17g", *x);
}

std::string run_csv(std::span<const RunRecord> records) {
  std::string out = kRunCsvHeader;
  out += '\n';
  for (const RunRecord& r : records) {
    out += std::to_string(r.t);
    for (std::optional<double> x : {std::optional<double>(r.beta), std::optional<double>(r.alpha),
                                    std::optional<double>(r.cost_inner),
                                    std::optional<double>(r.l1_p), std::optional<double>(r.l1_q),
                                    r.subopt_rounded, r.bound_thm2}) {
      out += ',';
      out += format_cell(x);
    }
    out += '\n';
  }
  return out;
}

void write_run_csv(const std::filesystem::path& path, std::span<const RunRecord> records) {
  write_text(path, run_csv(records));
}

void Table::add(std::vector<std::string> row) {
  if (row.size() != header.size()) throw std::invalid_argument("Table::add: wrong row width");
  rows.push_back(std::move(row));
}

std::string Table::csv() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out += ',';
      out += cells[k];
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

void write_table(const std::filesystem::path& path, const Table& table) {
  write_text(path, table.csv());
}

std::string render_svg(const Plot& plot) {
  constexpr double W = 720, H = 480, L = 80, R = 180, T = 40, B = 60;
  Axis ax{plot.logx};
  Axis ay{plot.logy};
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  for (const Series& s : plot.series) {
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if (!ax.usable(s.x[k]) || !ay.usable(s.y[k])) continue;
      xlo = std::min(xlo, s.x[k]);
      xhi = std::max(xhi, s.x[k]);
      ylo = std::min(ylo, s.y[k]);
      yhi = std::max(yhi, s.y[k]);
    }
  }
  settle(ax, xlo, xhi);
  settle(ay, ylo, yhi);
  auto px = [&](double v) { return L + (ax.map(v) - ax.lo) / (ax.hi - ax.lo) * (W - L - R); };
  auto py = [&](double v) { return H - B - (ay.map(v) - ay.lo) / (ay.hi - ay.lo) * (H - T - B); };
  auto inside_x = [&](double v) {
    return ax.usable(v) && ax.map(v) >= ax.lo - 1e-12 && ax.map(v) <= ax.hi + 1e-12;
  };

  std::string o;
  o += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" "
       "viewBox=\"0 0 720 480\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o += "<rect x=\"0\" y=\"0\" width=\"720\" height=\"480\" fill=\"white\"/>\n";
  o += "<text x=\"" + fmt("%.1f", (W - R + L) / 2) + "\" y=\"24\" text-anchor=\"middle\" "
       "font-size=\"14\">" + escape_xml(plot.title) + "</text>\n";

  for (const auto& [v, label] : ticks(ax)) {
    const double x = L + (v - ax.lo) / (ax.hi - ax.lo) * (W - L - R);
    o += "<line x1=\"" + fmt("%.2f", x) + "\" y1=\"" + fmt("%.2f", T) + "\" x2=\"" +
         fmt("%.2f", x) + "\" y2=\"" + fmt("%.2f", H - B) + "\" stroke=\"#e0e0e0\"/>\n";
    o += "<text x=\"" + fmt("%.2f", x) + "\" y=\"" + fmt("%.2f", H - B + 16) +
         "\" text-anchor=\"middle\">" + label + "</text>\n";
  }
  for (const auto& [v, label] : ticks(ay)) {
    const double y = H - B - (v - ay.lo) / (ay.hi - ay.lo) * (H - T - B);
    o += "<line x1=\"" + fmt("%.2f", L) + "\" y1=\"" + fmt("%.2f", y) + "\" x2=\"" +
         fmt("%.2f", W - R) + "\" y2=\"" + fmt("%.2f", y) + "\" stroke=\"#e0e0e0\"/>\n";
    o += "<text x=\"" + fmt("%.2f", L - 6) + "\" y=\"" + fmt("%.2f", y + 4) +
         "\" text-anchor=\"end\">" + label + "</text>\n";
  }
  o += "<rect x=\"" + fmt("%.2f", L) + "\" y=\"" + fmt("%.2f", T) + "\" width=\"" +
       fmt("%.2f", W - L - R) + "\" height=\"" + fmt("%.2f", H - T - B) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  o += "<text x=\"" + fmt("%.1f", (W - R + L) / 2) + "\" y=\"" + fmt("%.1f", H - 16) +
       "\" text-anchor=\"middle\">" + escape_xml(plot.xlabel) + "</text>\n";
  o += "<text x=\"18\" y=\"" + fmt("%.1f", (H - B + T) / 2) + "\" text-anchor=\"middle\" "
       "transform=\"rotate(-90 18 " + fmt("%.1f", (H - B + T) / 2) + ")\">" +
       escape_xml(plot.ylabel) + "</text>\n";

  for (double v : plot.vlines) {
    if (!inside_x(v)) continue;
    const double x = px(v);
    o += "<line x1=\"" + fmt("%.2f", x) + "\" y1=\"" + fmt("%.2f", T) + "\" x2=\"" +
         fmt("%.2f", x) + "\" y2=\"" + fmt("%.2f", H - B) +
         "\" stroke=\"#999999\" stroke-dasharray=\"2,3\"/>\n";
  }

  for (std::size_t s = 0; s < plot.series.size(); ++s) {
    const Series& ser = plot.series[s];
    const char* color = kPalette[s % kPalette.size()];
    std::string pts;
    for (std::size_t k = 0; k < std::min(ser.x.size(), ser.y.size()); ++k) {
      if (!ax.usable(ser.x[k]) || !ay.usable(ser.y[k])) continue;
      if (!pts.empty()) pts += ' ';
      pts += fmt("%.2f", px(ser.x[k])) + "," + fmt("%.2f", py(ser.y[k]));
    }
    if (!pts.empty()) {
      o += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\"";
      if (ser.dashed) o += " stroke-dasharray=\"6,4\"";
      o += " points=\"" + pts + "\"/>\n";
    }
    const double ly = T + 14 + 18 * static_cast<double>(s);
    o += "<line x1=\"" + fmt("%.2f", W - R + 10) + "\" y1=\"" + fmt("%.2f", ly - 4) + "\" x2=\"" +
         fmt("%.2f", W - R + 34) + "\" y2=\"" + fmt("%.2f", ly - 4) + "\" stroke=\"" + color +
         "\" stroke-width=\"1.5\"" + (ser.dashed ? " stroke-dasharray=\"6,4\"" : "") + "/>\n";
    o += "<text x=\"" + fmt("%.2f", W - R + 40) + "\" y=\"" + fmt("%.2f", ly) + "\">" +
         escape_xml(ser.name) + "</text>\n";
  }

  for (const auto& [x, y] : plot.markers) {
    if (!ax.usable(x) || !ay.usable(y)) continue;
    o += "<circle cx=\"" + fmt("%.2f", px(x)) + "\" cy=\"" + fmt("%.2f", py(y)) +
         "\" r=\"5\" fill=\"none\" stroke=\"red\" stroke-width=\"2\"/>\n";
  }
  o += "</svg>\n";
  return o;
}

void write_svg(const std::filesystem::path& path, const Plot& plot) {
  write_text(path, render_svg(plot));
}

void Manifest::set(std::string key, std::string value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  entries_.emplace_back(std::move(key), std::move(value));
}

void Manifest::set(std::string key, double value) { set(std::move(key), fmt("%.17g", value)); }

std::string Manifest::text() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

void Manifest::write(const std::filesystem::path& path) const { write_text(path, text()); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  f << text;
  f.flush();
  if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace asink
