#include "output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "handles.hpp"

namespace pushsum_cli {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvWriter::header(const std::vector<std::string>& columns) {
  for (const auto& c : columns) field(c);
  end_row();
}

CsvWriter& CsvWriter::field(const std::string& s) {
  if (!first_) out_ << ',';
  first_ = false;
  if (s.find_first_of(",\"\n") == std::string::npos) {
    out_ << s;
  } else {
    out_ << '"';
    for (char ch : s) out_ << (ch == '"' ? "\"\"" : std::string(1, ch));
    out_ << '"';
  }
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  first_ = true;
}

std::vector<double> moving_average(const std::vector<double>& ys, std::size_t window) {
  std::vector<double> out(ys.size());
  if (window == 0) window = 1;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    sum += ys[i];
    ++count;
    if (count > window) {
      sum -= ys[i - window];
      --count;
    }
    out[i] = sum / static_cast<double>(count);
  }
  return out;
}

namespace {

constexpr double kWidth = 820.0;
constexpr double kPanelHeight = 320.0;
constexpr double kLeft = 90.0;
constexpr double kRight = 170.0;
constexpr double kTop = 36.0;
constexpr double kBottom = 48.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

struct Range {
  double lo = INFINITY, hi = -INFINITY;
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (lo == hi) {
      const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.05;
      lo -= pad;
      hi += pad;
    }
  }
};

void write_panel(std::ostream& out, const Panel& panel, double y0) {
  Range xr, yr;
  for (const auto& s : panel.series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  xr.settle();
  yr.settle();
  const double pw = kWidth - kLeft - kRight;
  const double ph = kPanelHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return y0 + kTop + (1.0 - (y - yr.lo) / (yr.hi - yr.lo)) * ph; };

  out << "<text x=\"" << num(kLeft) << "\" y=\"" << num(y0 + 22) << "\" font-size=\"15\">" << escape(panel.title)
      << "</text>\n";
  out << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(y0 + kTop) << "\" width=\"" << num(pw) << "\" height=\""
      << num(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = xr.lo + (xr.hi - xr.lo) * t / 4.0;
    const double yv = yr.lo + (yr.hi - yr.lo) * t / 4.0;
    out << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(y0 + kTop + ph + 16)
        << "\" font-size=\"11\" text-anchor=\"middle\">" << tick_label(xv) << "</text>\n";
    out << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(yv) + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">" << tick_label(yv) << "</text>\n";
    out << "<line x1=\"" << num(kLeft) << "\" x2=\"" << num(kLeft + pw) << "\" y1=\"" << num(py(yv)) << "\" y2=\""
        << num(py(yv)) << "\" stroke=\"#ddd\"/>\n";
  }
  out << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(y0 + kPanelHeight - 10)
      << "\" font-size=\"12\" text-anchor=\"middle\">" << escape(panel.x_label) << "</text>\n";
  out << "<text x=\"16\" y=\"" << num(y0 + kTop + ph / 2) << "\" font-size=\"12\" transform=\"rotate(-90 16 "
      << num(y0 + kTop + ph / 2) << ")\" text-anchor=\"middle\">" << escape(panel.y_label) << "</text>\n";

  double legend_y = y0 + kTop + 10;
  for (const auto& s : panel.series) {
    if (s.points) {
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        out << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i])) << "\" r=\"2.2\" fill=\""
            << s.color << "\"/>\n";
      }
    } else {
      out << "<polyline fill=\"none\" stroke-width=\"1.6\" stroke=\"" << s.color << "\" points=\"";
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) out << num(px(s.x[i])) << ',' << num(py(s.y[i])) << ' ';
      }
      out << "\"/>\n";
    }
    const double lx = kLeft + pw + 12;
    out << "<rect x=\"" << num(lx) << "\" y=\"" << num(legend_y - 8) << "\" width=\"10\" height=\"10\" fill=\""
        << s.color << "\"/>\n";
    out << "<text x=\"" << num(lx + 16) << "\" y=\"" << num(legend_y + 1) << "\" font-size=\"11\">"
        << escape(s.label) << "</text>\n";
    legend_y += 18;
  }
}

}  // namespace

void write_svg(const std::string& path, const std::vector<Panel>& panels) {
  std::ofstream out(path);
  if (!out) throw CliError(2, "cannot write " + path);
  const double height = kPanelHeight * static_cast<double>(panels.size());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(height)
      << "\" font-family=\"sans-serif\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) write_panel(out, panels[i], kPanelHeight * static_cast<double>(i));
  out << "</svg>\n";
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::mutex mu;
  std::size_t next = 0;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (error || next >= count) return;
        i = next++;
      }
      try {
        task(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned n = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace pushsum_cli
