#include "core/report.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

#include "core/csv.hpp"
#include "core/errors.hpp"

namespace momlab {

namespace {

constexpr const char* kMetrics[] = {"pf",     "mean_raw", "implemented_return",
                                    "volatility", "sharpe",   "t_stat",
                                    "n_periods"};

std::optional<double> metric_value(const BacktestSummary& s, std::string_view metric) {
  if (metric == "pf") return s.profitability;
  if (metric == "mean_raw") return s.mean_raw;
  if (metric == "implemented_return") return s.implemented_return;
  if (metric == "volatility") return s.volatility;
  if (metric == "sharpe") {
    if (s.zero_volatility) return std::nullopt;  // flagged, never an infinity
    return s.sharpe;
  }
  if (metric == "t_stat") {
    if (s.zero_volatility) return std::nullopt;
    return s.t_stat;
  }
  if (metric == "n_periods") return double(s.n_periods);
  return std::nullopt;
}

std::string opt_str(std::optional<double> v) {
  return v ? format_double(*v) : std::string();
}

// ----- SVG heatmaps ---------------------------------------------------------

struct Rgb {
  int r, g, b;
};

std::string hex(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", c.r, c.g, c.b);
  return std::string(buf);
}

Rgb lerp(Rgb a, Rgb b, double t) {
  t = std::clamp(t, 0.0, 1.0);
  return {int(std::lround(a.r + (b.r - a.r) * t)), int(std::lround(a.g + (b.g - a.g) * t)),
          int(std::lround(a.b + (b.b - a.b) * t))};
}

constexpr Rgb kBlue{31, 119, 180};
constexpr Rgb kRed{214, 39, 40};
constexpr Rgb kWhite{255, 255, 255};
constexpr Rgb kOrange{230, 85, 13};
constexpr Rgb kMissing{204, 204, 204};

// Diverging blue-white-red over [-bound, +bound].
std::string diverging(double v, double bound) {
  if (bound <= 0.0) bound = 1.0;
  const double t = std::clamp(v / bound, -1.0, 1.0);
  return hex(t < 0.0 ? lerp(kWhite, kBlue, -t) : lerp(kWhite, kRed, t));
}

// Sequential white-orange over [0, bound].
std::string sequential(double v, double bound) {
  if (bound <= 0.0) bound = 1.0;
  return hex(lerp(kWhite, kOrange, std::clamp(v / bound, 0.0, 1.0)));
}

struct HeatmapSpec {
  std::string title;
  std::string legend_low, legend_mid, legend_high;
  // color(value) for present cells
  std::function<std::string(double)> color;
};

std::string svg_heatmap(int j_min, int j_max, int k_min, int k_max,
                        const std::function<std::optional<double>(int, int)>& value,
                        const HeatmapSpec& spec) {
  const int nj = j_max - j_min + 1;
  const int nk = k_max - k_min + 1;
  const int cell = 28;
  const int left = 56, top = 48, right = 24, bottom = 72;
  const int width = left + nk * cell + right;
  const int height = top + nj * cell + bottom;

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
       "\" height=\"" + std::to_string(height) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + std::to_string(left) + "\" y=\"20\" font-family=\"monospace\" font-size=\"14\">" +
       spec.title + "</text>\n";

  for (int j = j_min; j <= j_max; ++j) {
    for (int k = k_min; k <= k_max; ++k) {
      const int x = left + (k - k_min) * cell;
      const int y = top + (j - j_min) * cell;
      const auto v = value(j, k);
      const std::string fill = v ? spec.color(*v) : hex(kMissing);
      s += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" +
           std::to_string(cell) + "\" height=\"" + std::to_string(cell) + "\" fill=\"" + fill +
           "\" stroke=\"#888888\" stroke-width=\"0.5\"><title>J=" + std::to_string(j) +
           " K=" + std::to_string(k) + " value=" + (v ? format_double(*v) : "n/a") +
           "</title></rect>\n";
    }
  }

  // Axis labels.
  for (int k = k_min; k <= k_max; ++k)
    s += "<text x=\"" + std::to_string(left + (k - k_min) * cell + cell / 2) + "\" y=\"" +
         std::to_string(top + nj * cell + 16) +
         "\" font-family=\"monospace\" font-size=\"10\" text-anchor=\"middle\">" +
         std::to_string(k) + "</text>\n";
  for (int j = j_min; j <= j_max; ++j)
    s += "<text x=\"" + std::to_string(left - 8) + "\" y=\"" +
         std::to_string(top + (j - j_min) * cell + cell / 2 + 4) +
         "\" font-family=\"monospace\" font-size=\"10\" text-anchor=\"end\">" +
         std::to_string(j) + "</text>\n";
  s += "<text x=\"" + std::to_string(left + nk * cell / 2) + "\" y=\"" +
       std::to_string(top + nj * cell + 34) +
       "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\">K (holding periods)"
       "</text>\n";
  s += "<text x=\"14\" y=\"" + std::to_string(top + nj * cell / 2) +
       "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 "
       "14 " + std::to_string(top + nj * cell / 2) + ")\">J (lookback periods)</text>\n";

  // Legend: color scale bounds.
  const int ly = top + nj * cell + 44;
  s += "<text x=\"" + std::to_string(left) + "\" y=\"" + std::to_string(ly + 12) +
       "\" font-family=\"monospace\" font-size=\"10\">scale: " + spec.legend_low + " | " +
       spec.legend_mid + " | " + spec.legend_high + "</text>\n";
  s += "</svg>\n";
  return s;
}

std::string heatmap_for_metric(const GridResult& grid, std::string_view metric,
                               const ReportOptions& options) {
  auto value = [&](int j, int k) -> std::optional<double> {
    const auto& c = grid.cell(j, k);
    if (!c.summary) return std::nullopt;
    return metric_value(*c.summary, metric);
  };

  HeatmapSpec spec;
  const std::string suffix = " [" + grid.universe_label + ", " + grid.criterion_name + "]";
  if (metric == "pf") {
    // PF is binary: exactly two colors.
    spec.title = "Profitability" + suffix;
    spec.legend_low = "-1 " + hex(kBlue);
    spec.legend_mid = "";
    spec.legend_high = "+1 " + hex(kRed);
    spec.color = [](double v) { return v > 0.0 ? hex(kRed) : hex(kBlue); };
  } else if (metric == "implemented_return") {
    const double b = options.heat_return_bound;
    spec.title = "Return" + suffix;
    spec.legend_low = "-" + format_double(b) + " " + hex(kBlue);
    spec.legend_mid = "0 " + hex(kWhite);
    spec.legend_high = "+" + format_double(b) + " " + hex(kRed);
    spec.color = [b](double v) { return diverging(v, b); };
  } else if (metric == "volatility") {
    double vmax = 0.0;
    for (const auto& c : grid.cells)
      if (c.summary) vmax = std::max(vmax, c.summary->volatility);
    if (vmax <= 0.0) vmax = 1.0;
    spec.title = "Volatility" + suffix;
    spec.legend_low = "0 " + hex(kWhite);
    spec.legend_mid = "";
    spec.legend_high = format_double(vmax) + " " + hex(kOrange);
    spec.color = [vmax](double v) { return sequential(v, vmax); };
  } else {  // sharpe
    double bound = 0.0;
    for (const auto& c : grid.cells)
      if (c.summary && !c.summary->zero_volatility)
        bound = std::max(bound, std::abs(c.summary->sharpe));
    if (bound <= 0.0) bound = 1.0;
    spec.title = "Sharpe ratio" + suffix;
    spec.legend_low = "-" + format_double(bound) + " " + hex(kBlue);
    spec.legend_mid = "0 " + hex(kWhite);
    spec.legend_high = "+" + format_double(bound) + " " + hex(kRed);
    spec.color = [bound](double v) { return diverging(v, bound); };
  }
  return svg_heatmap(grid.j_min, grid.j_max, grid.k_min, grid.k_max, value, spec);
}

std::string relative_heatmap(const RelativeGrid& grid) {
  double bound = 0.0;
  for (const auto& v : grid.values)
    if (v) bound = std::max(bound, std::abs(*v));
  if (bound <= 0.0) bound = 1.0;

  HeatmapSpec spec;
  const char* what = grid.metric == GridMetric::implemented_return ? "return" : "Sharpe";
  spec.title = std::string("Relative ") + what + " [" + grid.sub_label + " vs " +
               grid.base_label + "]";
  spec.legend_low = "-" + format_double(bound) + " " + hex(kBlue);
  spec.legend_mid = "0 " + hex(kWhite);
  spec.legend_high = "+" + format_double(bound) + " " + hex(kRed);
  spec.color = [bound](double v) { return diverging(v, bound); };
  return svg_heatmap(grid.j_min, grid.j_max, grid.k_min, grid.k_max,
                     [&](int j, int k) { return grid.at(j, k); }, spec);
}

std::string matrix_csv(const GridResult& grid, std::string_view metric) {
  std::string s = "J\\K";
  for (int k = grid.k_min; k <= grid.k_max; ++k) s += "," + std::to_string(k);
  s += "\n";
  for (int j = grid.j_min; j <= grid.j_max; ++j) {
    s += std::to_string(j);
    for (int k = grid.k_min; k <= grid.k_max; ++k) {
      const auto& c = grid.cell(j, k);
      s += ",";
      if (c.summary) s += opt_str(metric_value(*c.summary, metric));
    }
    s += "\n";
  }
  return s;
}

void write_grid_files(const GridResult& grid, const std::filesystem::path& dir,
                      const ReportOptions& options) {
  atomic_write_file(dir / "grid.csv", grid_csv(grid));

  std::string errors = "J,K,error\n";
  for (const auto& c : grid.cells)
    if (!c.summary)
      errors += std::to_string(c.lookback) + "," + std::to_string(c.holding) + "," + c.error +
                "\n";
  atomic_write_file(dir / "grid_errors.csv", errors);

  atomic_write_file(dir / "heatmap_profitability.svg", heatmap_for_metric(grid, "pf", options));
  atomic_write_file(dir / "heatmap_return.svg",
                    heatmap_for_metric(grid, "implemented_return", options));
  atomic_write_file(dir / "heatmap_volatility.svg",
                    heatmap_for_metric(grid, "volatility", options));
  atomic_write_file(dir / "heatmap_sharpe.svg", heatmap_for_metric(grid, "sharpe", options));

  if (options.matrix_csv)
    for (const char* metric : kMetrics)
      atomic_write_file(dir / ("grid_matrix_" + std::string(metric) + ".csv"),
                        matrix_csv(grid, metric));
}

std::string sanitize_label(std::string label) {
  for (char& c : label)
    if (c == '/' || c == '\\' || c == ' ') c = '_';
  return label;
}

}  // namespace

std::string grid_csv(const GridResult& grid) {
  std::string s = "J,K,metric,value\n";
  for (int j = grid.j_min; j <= grid.j_max; ++j) {
    for (int k = grid.k_min; k <= grid.k_max; ++k) {
      const auto& c = grid.cell(j, k);
      for (const char* metric : kMetrics) {
        s += std::to_string(j) + "," + std::to_string(k) + "," + metric + ",";
        if (c.summary) s += opt_str(metric_value(*c.summary, metric));
        s += "\n";
      }
    }
  }
  return s;
}

std::string relative_grid_csv(const RelativeGrid& grid) {
  std::string s = "J,K,value\n";
  for (int j = grid.j_min; j <= grid.j_max; ++j)
    for (int k = grid.k_min; k <= grid.k_max; ++k) {
      const auto v = grid.at(j, k);
      s += std::to_string(j) + "," + std::to_string(k) + "," + opt_str(v) + "\n";
    }
  return s;
}

void write_backtest_outputs(const BacktestResult& result, const PriceStore& store,
                            const std::filesystem::path& dir, const nlohmann::json& manifest) {
  const auto& s = result.summary;
  std::string summary = "J,K,universe,criterion,r,sigma,PF,r_I,SR,t,n\n";
  summary += std::to_string(result.spec.lookback) + "," + std::to_string(result.spec.holding) +
             "," + result.spec.universe.label + "," + criterion_name(result.spec.criterion) +
             "," + format_double(s.mean_raw) + "," + format_double(s.volatility) + "," +
             format_double(s.profitability) + "," + format_double(s.implemented_return) + "," +
             (s.zero_volatility ? "" : format_double(s.sharpe)) + "," +
             (s.zero_volatility ? "" : format_double(s.t_stat)) + "," +
             std::to_string(s.n_periods) + "\n";
  atomic_write_file(dir / "summary.csv", summary);

  std::string series = "date,raw_return\n";
  for (size_t i = 0; i < result.series_raw.size(); ++i)
    series += format_date(store.calendar().dates[size_t(result.series_ords[i])]) + "," +
              format_double(result.series_raw[i]) + "\n";
  atomic_write_file(dir / "series.csv", series);

  atomic_write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

void write_grid_outputs(const GridResult& grid, const std::filesystem::path& dir,
                        const ReportOptions& options, const nlohmann::json& manifest) {
  write_grid_files(grid, dir, options);
  atomic_write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

void write_compare_outputs(const ComparisonResult& comparison, const std::filesystem::path& dir,
                           const ReportOptions& options, const nlohmann::json& manifest) {
  for (size_t i = 0; i < comparison.grids.size(); ++i)
    write_grid_files(comparison.grids[i], dir / "universes" / sanitize_label(comparison.labels[i]),
                     options);
  for (size_t i = 0; i < comparison.rel_return.size(); ++i) {
    const auto sub_dir = dir / "relative" / sanitize_label(comparison.labels[i + 1]);
    atomic_write_file(sub_dir / "relative_return.csv",
                      relative_grid_csv(comparison.rel_return[i]));
    atomic_write_file(sub_dir / "relative_sharpe.csv",
                      relative_grid_csv(comparison.rel_sharpe[i]));
    atomic_write_file(sub_dir / "relative_return.svg",
                      relative_heatmap(comparison.rel_return[i]));
    atomic_write_file(sub_dir / "relative_sharpe.svg",
                      relative_heatmap(comparison.rel_sharpe[i]));
  }
  atomic_write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace momlab
