// report.hpp — CSV tables, SVG heatmaps and run manifests.
#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "core/engine.hpp"

namespace momlab {

struct ReportOptions {
  double heat_return_bound = 0.025;  // return heatmap color scale, ± per period
  bool matrix_csv = false;           // also emit matrix-orientation CSVs
};

/// summary.csv (one row), series.csv and manifest.json.
void write_backtest_outputs(const BacktestResult& result, const PriceStore& store,
                            const std::filesystem::path& dir, const nlohmann::json& manifest);

/// grid.csv (long format J,K,metric,value), grid_errors.csv, four heatmaps
/// (profitability, return, volatility, sharpe) and manifest.json.
void write_grid_outputs(const GridResult& grid, const std::filesystem::path& dir,
                        const ReportOptions& options, const nlohmann::json& manifest);

/// Per-universe grids under universes/<label>/ plus relative grids and
/// heatmaps versus the baseline under relative/<label>/.
void write_compare_outputs(const ComparisonResult& comparison, const std::filesystem::path& dir,
                           const ReportOptions& options, const nlohmann::json& manifest);

/// Long-format grid CSV content (exposed for golden tests).
std::string grid_csv(const GridResult& grid);

std::string relative_grid_csv(const RelativeGrid& grid);

}  // namespace momlab
