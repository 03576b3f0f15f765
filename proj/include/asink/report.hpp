// CSV, SVG and manifest writers for experiment output. All output is a pure
// function of its inputs so reruns are byte-identical.
#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "asink/solvers.hpp"

namespace asink {

/// `t,beta,alpha,cost_inner,l1_p,l1_q,subopt_rounded,bound_thm2`.
extern const char* const kRunCsvHeader;

/// %.17g; empty for nullopt.
std::string format_cell(std::optional<double> x);

std::string run_csv(std::span<const RunRecord> records);
void write_run_csv(const std::filesystem::path& path, std::span<const RunRecord> records);

/// A small summary table with its own header.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
  std::string csv() const;
};
void write_table(const std::filesystem::path& path, const Table& table);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct Plot {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool logx = true;
  bool logy = true;
  std::vector<Series> series;
  std::vector<double> vlines;                       // e.g. schedule update times
  std::vector<std::pair<double, double>> markers;   // highlighted points
};

/// Line plot as standalone SVG. Points with nonpositive coordinates on a log
/// axis, or non-finite ones, are dropped.
std::string render_svg(const Plot& plot);
void write_svg(const std::filesystem::path& path, const Plot& plot);

/// `key = value` lines, in insertion order.
class Manifest {
 public:
  void set(std::string key, std::string value);
  void set(std::string key, double value);
  std::string text() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Writes `text` to `path`, throwing std::runtime_error on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace asink
