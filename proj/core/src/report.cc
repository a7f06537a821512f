#include "lcgln/report.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "lcgln/errors.h"

namespace lcgln {

namespace {

constexpr std::array<const char*, 8> kPalette = {
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 64.0;
constexpr double kRight = 180.0;
constexpr double kTop = 24.0;
constexpr double kBottom = 48.0;

void RequireNonEmpty(std::span<const Summary> summaries) {
  if (summaries.empty()) throw ContractError("report needs at least one summary");
}

std::string Fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string Px(double v) { return Fmt("%.2f", v); }

std::string Escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

double YMax(std::span<const Summary> summaries) {
  double top = 0.0;
  for (const auto& s : summaries) top = std::max(top, s.mean + s.sem);
  if (!(top > 0.0)) return 1.0;
  // Round up to a tidy tick step.
  const double step = std::pow(10.0, std::floor(std::log10(top)));
  return std::ceil(top * 1.1 / step) * step;
}

struct Frame {
  double y_max;
  double PlotY(double v) const {
    return kTop + (kHeight - kTop - kBottom) * (1.0 - v / y_max);
  }
};

void OpenSvg(std::ostringstream& out, const Frame& frame, std::string_view x_label) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Px(kWidth)
      << "\" height=\"" << Px(kHeight) << "\" viewBox=\"0 0 " << Px(kWidth) << ' '
      << Px(kHeight) << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << Px(kWidth) << "\" height=\""
      << Px(kHeight) << "\" fill=\"white\"/>\n";
  const double x0 = kLeft;
  const double x1 = kWidth - kRight;
  const double y0 = kHeight - kBottom;
  out << "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n";
  out << "<line x1=\"" << Px(x0) << "\" y1=\"" << Px(y0) << "\" x2=\"" << Px(x1)
      << "\" y2=\"" << Px(y0) << "\"/>\n";
  out << "<line x1=\"" << Px(x0) << "\" y1=\"" << Px(kTop) << "\" x2=\"" << Px(x0)
      << "\" y2=\"" << Px(y0) << "\"/>\n";
  out << "</g>\n";
  out << "<g class=\"yticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double v = frame.y_max * i / 5.0;
    const double y = frame.PlotY(v);
    out << "<line x1=\"" << Px(x0 - 4) << "\" y1=\"" << Px(y) << "\" x2=\"" << Px(x0)
        << "\" y2=\"" << Px(y) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << Px(x0 - 8) << "\" y=\"" << Px(y + 4)
        << "\" text-anchor=\"end\">" << Fmt("%.3g", v) << "</text>\n";
  }
  out << "</g>\n";
  out << "<text x=\"" << Px((x0 + x1) / 2) << "\" y=\"" << Px(kHeight - 10)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << Escape(x_label) << "</text>\n";
  out << "<text x=\"16\" y=\"" << Px((kTop + y0) / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 16 "
      << Px((kTop + y0) / 2) << ")\">normalized test regret</text>\n";
}

void ErrorBar(std::ostringstream& out, double x, double lo, double hi,
              const char* color) {
  out << "<path class=\"errorbar\" stroke=\"" << color << "\" fill=\"none\" d=\"M "
      << Px(x) << ' ' << Px(lo) << " V " << Px(hi) << " M " << Px(x - 4) << ' '
      << Px(lo) << " H " << Px(x + 4) << " M " << Px(x - 4) << ' ' << Px(hi)
      << " H " << Px(x + 4) << "\"/>\n";
}

void Legend(std::ostringstream& out, const std::vector<std::string>& labels) {
  out << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"11\">\n";
  const double x = kWidth - kRight + 16;
  for (size_t i = 0; i < labels.size(); ++i) {
    const double y = kTop + 8 + 18.0 * static_cast<double>(i);
    out << "<rect x=\"" << Px(x) << "\" y=\"" << Px(y - 8) << "\" width=\"10\" height=\"10\" fill=\""
        << kPalette[i % kPalette.size()] << "\"/>\n";
    out << "<text x=\"" << Px(x + 16) << "\" y=\"" << Px(y + 1) << "\">"
        << Escape(labels[i]) << "</text>\n";
  }
  out << "</g>\n";
}

bool SingleProblem(std::span<const Summary> summaries) {
  return std::all_of(summaries.begin(), summaries.end(), [&](const Summary& s) {
    return s.problem == summaries.front().problem;
  });
}

}  // namespace

std::string_view ReportFormatName(ReportFormat format) {
  switch (format) {
    case ReportFormat::kTable:
      return "table";
    case ReportFormat::kLineplot:
      return "lineplot";
    case ReportFormat::kHistogram:
      return "histogram";
  }
  return "unknown";
}

std::optional<ReportFormat> ParseReportFormat(std::string_view name) {
  for (auto f : {ReportFormat::kTable, ReportFormat::kLineplot, ReportFormat::kHistogram}) {
    if (ReportFormatName(f) == name) return f;
  }
  return std::nullopt;
}

std::string FormatTableText(std::span<const Summary> summaries) {
  RequireNonEmpty(summaries);
  const std::array<std::string, 7> header = {"problem", "method", "samples", "fakes",
                                             "runs", "mean", "sem"};
  std::vector<std::array<std::string, 7>> rows;
  for (const auto& s : summaries) {
    rows.push_back({s.problem, s.method, std::to_string(s.samples),
                    std::to_string(s.fakes), std::to_string(s.count),
                    Fmt("%.4f", s.mean), Fmt("%.4f", s.sem)});
  }
  std::array<size_t, 7> width{};
  for (size_t c = 0; c < width.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& r : rows) width[c] = std::max(width[c], r[c].size());
  }
  std::string out;
  auto line = [&](const std::array<std::string, 7>& cells) {
    for (size_t c = 0; c < cells.size(); ++c) {
      const std::string pad(width[c] - cells[c].size(), ' ');
      // Text columns left-aligned, numbers right-aligned.
      out += c < 2 ? cells[c] + pad : pad + cells[c];
      out += c + 1 < cells.size() ? "  " : "\n";
    }
  };
  line(header);
  size_t total = 2 * (width.size() - 1);
  for (size_t w : width) total += w;
  out += std::string(total, '-') + "\n";
  for (const auto& r : rows) line(r);
  return out;
}

std::string FormatTableCsv(std::span<const Summary> summaries) {
  RequireNonEmpty(summaries);
  std::string out = "problem,method,samples,fakes,runs,mean,sem\n";
  for (const auto& s : summaries) {
    out += s.problem + ',' + s.method + ',' + std::to_string(s.samples) + ',' +
           std::to_string(s.fakes) + ',' + std::to_string(s.count) + ',' +
           Fmt("%.17g", s.mean) + ',' + Fmt("%.17g", s.sem) + '\n';
  }
  return out;
}

std::vector<Summary> ParseTableCsv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != "problem,method,samples,fakes,runs,mean,sem") {
    throw IngestionError("table csv: unexpected header");
  }
  std::vector<Summary> out;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) f.push_back(cell);
    if (f.size() != 7) {
      throw IngestionError("table csv line " + std::to_string(number) +
                           ": expected 7 fields");
    }
    try {
      size_t used = 0;
      Summary s;
      s.problem = f[0];
      s.method = f[1];
      s.samples = std::stoi(f[2]);
      s.fakes = std::stoi(f[3]);
      s.count = std::stoi(f[4]);
      s.mean = std::stod(f[5], &used);
      if (used != f[5].size()) throw std::invalid_argument("mean");
      s.sem = std::stod(f[6], &used);
      if (used != f[6].size()) throw std::invalid_argument("sem");
      out.push_back(std::move(s));
    } catch (const std::logic_error&) {
      throw IngestionError("table csv line " + std::to_string(number) +
                           ": malformed number");
    }
  }
  return out;
}

std::string LineplotSvg(std::span<const Summary> summaries) {
  RequireNonEmpty(summaries);
  const bool one_problem = SingleProblem(summaries);
  std::map<std::tuple<std::string, std::string, int>, std::vector<const Summary*>> series;
  std::vector<int> ks;
  bool multiple_fakes = false;
  for (const auto& s : summaries) {
    series[{s.problem, s.method, s.fakes}].push_back(&s);
    ks.push_back(s.samples);
    multiple_fakes |= s.fakes != summaries.front().fakes;
  }
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  const Frame frame{YMax(summaries)};
  const double x0 = kLeft + 24;
  const double x1 = kWidth - kRight - 24;
  const double lo = std::log2(std::max(ks.front(), 1));
  const double hi = std::log2(std::max(ks.back(), 1));
  auto plot_x = [&](int k) {
    if (hi == lo) return (x0 + x1) / 2;
    return x0 + (x1 - x0) * (std::log2(std::max(k, 1)) - lo) / (hi - lo);
  };

  std::ostringstream out;
  OpenSvg(out, frame, "samples per instance (K)");
  out << "<g class=\"xticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int k : ks) {
    const double x = plot_x(k);
    out << "<text x=\"" << Px(x) << "\" y=\"" << Px(kHeight - kBottom + 16)
        << "\" text-anchor=\"middle\">" << k << "</text>\n";
  }
  out << "</g>\n";

  std::vector<std::string> labels;
  size_t index = 0;
  for (auto& [key, points] : series) {
    const char* color = kPalette[index % kPalette.size()];
    std::sort(points.begin(), points.end(),
              [](const Summary* a, const Summary* b) { return a->samples < b->samples; });
    std::string label = one_problem ? "" : std::get<0>(key) + " ";
    label += std::get<1>(key);
    if (multiple_fakes) label += " F=" + std::to_string(std::get<2>(key));
    labels.push_back(label);

    out << "<g class=\"series\">\n";
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < points.size(); ++i) {
      out << (i > 0 ? " " : "") << Px(plot_x(points[i]->samples)) << ','
          << Px(frame.PlotY(points[i]->mean));
    }
    out << "\"/>\n";
    for (const Summary* p : points) {
      const double x = plot_x(p->samples);
      ErrorBar(out, x, frame.PlotY(std::max(p->mean - p->sem, 0.0)),
               frame.PlotY(p->mean + p->sem), color);
      out << "<circle class=\"point\" cx=\"" << Px(x) << "\" cy=\""
          << Px(frame.PlotY(p->mean)) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    out << "</g>\n";
    ++index;
  }
  Legend(out, labels);
  out << "</svg>\n";
  return out.str();
}

std::string HistogramSvg(std::span<const Summary> summaries) {
  RequireNonEmpty(summaries);
  const bool one_problem = SingleProblem(summaries);
  std::vector<int> groups;
  std::vector<std::tuple<std::string, std::string, int>> bars;
  for (const auto& s : summaries) {
    groups.push_back(s.fakes);
    bars.emplace_back(s.problem, s.method, s.samples);
  }
  std::sort(groups.begin(), groups.end());
  groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
  std::sort(bars.begin(), bars.end());
  bars.erase(std::unique(bars.begin(), bars.end()), bars.end());
  bool multiple_k = false;
  for (const auto& b : bars) multiple_k |= std::get<2>(b) != std::get<2>(bars.front());

  const Frame frame{YMax(summaries)};
  const double x0 = kLeft + 8;
  const double x1 = kWidth - kRight - 8;
  const double group_width = (x1 - x0) / static_cast<double>(groups.size());
  const double bar_width = group_width * 0.8 / static_cast<double>(bars.size());

  std::ostringstream out;
  OpenSvg(out, frame, "fake targets (F)");
  for (size_t g = 0; g < groups.size(); ++g) {
    const double gx = x0 + group_width * static_cast<double>(g);
    out << "<g class=\"group\" data-fakes=\"" << groups[g] << "\">\n";
    out << "<text x=\"" << Px(gx + group_width / 2) << "\" y=\""
        << Px(kHeight - kBottom + 16)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << groups[g] << "</text>\n";
    for (size_t b = 0; b < bars.size(); ++b) {
      const auto it = std::find_if(summaries.begin(), summaries.end(), [&](const Summary& s) {
        return s.fakes == groups[g] &&
               std::tie(s.problem, s.method, s.samples) ==
                   std::tie(std::get<0>(bars[b]), std::get<1>(bars[b]),
                            std::get<2>(bars[b]));
      });
      if (it == summaries.end()) continue;
      const char* color = kPalette[b % kPalette.size()];
      const double bx = gx + group_width * 0.1 + bar_width * static_cast<double>(b);
      const double top = frame.PlotY(it->mean);
      out << "<rect class=\"bar\" x=\"" << Px(bx) << "\" y=\"" << Px(top)
          << "\" width=\"" << Px(bar_width) << "\" height=\""
          << Px(frame.PlotY(0.0) - top) << "\" fill=\"" << color << "\"/>\n";
      ErrorBar(out, bx + bar_width / 2, frame.PlotY(std::max(it->mean - it->sem, 0.0)),
               frame.PlotY(it->mean + it->sem), "black");
    }
    out << "</g>\n";
  }
  std::vector<std::string> labels;
  for (const auto& [problem, method, k] : bars) {
    std::string label = one_problem ? "" : problem + " ";
    label += method;
    if (multiple_k) label += " K=" + std::to_string(k);
    labels.push_back(label);
  }
  Legend(out, labels);
  out << "</svg>\n";
  return out.str();
}

std::vector<std::string> EmitReport(std::span<const Summary> summaries,
                                    ReportFormat format, const std::string& out) {
  RequireNonEmpty(summaries);
  auto write = [](const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IngestionError("cannot write " + path.string());
    file << text;
    if (!file.flush()) throw IngestionError("write failed for " + path.string());
    return path.string();
  };
  switch (format) {
    case ReportFormat::kTable: {
      std::filesystem::path text_path = out;
      std::filesystem::path csv_path = out;
      if (csv_path.extension() == ".csv") {
        text_path.replace_extension(".txt");
      } else {
        csv_path.replace_extension(".csv");
      }
      return {write(text_path, FormatTableText(summaries)),
              write(csv_path, FormatTableCsv(summaries))};
    }
    case ReportFormat::kLineplot:
      return {write(out, LineplotSvg(summaries))};
    case ReportFormat::kHistogram:
      return {write(out, HistogramSvg(summaries))};
  }
  return {};
}

}  // namespace lcgln
