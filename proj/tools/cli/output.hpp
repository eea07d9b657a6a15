#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace pushsum_cli {

/// 17 significant digits; "inf", "-inf" and "nan" for non-finite values.
std::string format_real(double v);

/// Comma-separated row writer. Header first, then one call per row.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(const std::vector<std::string>& columns);
  CsvWriter& field(const std::string& s);
  CsvWriter& field(double v) { return field(format_real(v)); }
  CsvWriter& field(std::uint64_t v) { return field(std::to_string(v)); }
  CsvWriter& field(int v) { return field(std::to_string(v)); }
  void end_row();

 private:
  std::ostream& out_;
  bool first_ = true;
};

/// Trailing moving average over `window` samples (shorter at the start).
std::vector<double> moving_average(const std::vector<double>& ys, std::size_t window);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color;
  bool points = false;  ///< markers instead of a polyline
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

/// Panels stacked vertically in one SVG document.
void write_svg(const std::string& path, const std::vector<Panel>& panels);

/// Runs task(i) for i in [0, count) on `threads` workers. Tasks must write
/// only to their own slot; the first thrown exception is rethrown.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task);

}  // namespace pushsum_cli
