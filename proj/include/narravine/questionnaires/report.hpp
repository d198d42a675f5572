#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "narravine/common/json.hpp"
#include "narravine/questionnaires/scoring.hpp"
#include "narravine/questionnaires/stats.hpp"

namespace narravine::questionnaires {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 if absent
};

// Comma-separated with a header row; double quotes allowed around cells.
CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text);

std::vector<SusResponse> sus_from_csv(const CsvTable& t);
std::vector<UeqResponse> ueq_from_csv(const CsvTable& t);

// Age-range categories of the multi-select audience item, in display order.
const std::vector<std::string>& audience_categories();

// Reads sus.csv, ueq.csv, adhoc1.csv, adhoc2.csv from `dir` (missing files
// are skipped) and returns the structured report.
Json analyze_questionnaires(const std::filesystem::path& dir, const UeqScaleMap& map = UeqScaleMap::shipped(),
                            const BenchmarkTable& bench = BenchmarkTable::shipped());

// Per-scale means with benchmark bands, for plotting.
Json ueq_plot_data(const std::vector<UeqScaleScore>& scores, const BenchmarkTable& bench);

}  // namespace narravine::questionnaires
