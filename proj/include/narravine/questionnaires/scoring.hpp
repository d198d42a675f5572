#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "narravine/common/json.hpp"
#include "narravine/questionnaires/errors.hpp"

namespace narravine::questionnaires {

struct Summary {
  int n = 0;
  double mean = 0;
  double sd = 0;  // sample standard deviation, 0 when n < 2
  double min = 0;
  double max = 0;
};

Summary summarize(const std::vector<double>& values);
void to_json(Json& j, const Summary& s);

// SUS -----------------------------------------------------------------

struct SusResponse {
  std::array<int, 10> items{};
};

double score_sus(const SusResponse& r);
SusResponse make_sus(const std::vector<int>& items);

// UEQ -----------------------------------------------------------------

inline constexpr int kUeqItems = 26;

struct UeqScale {
  std::string name;
  std::vector<int> items;  // 1-based item numbers
};

struct UeqScaleMap {
  std::vector<UeqScale> scales;
  std::set<int> reversed;  // positive pole on the left

  static UeqScaleMap load(const std::string& path);
  static UeqScaleMap shipped();
  int keyed(int item, int raw) const;
};

struct UeqResponse {
  std::vector<int> items;  // 26 raw answers in 1..7
};

struct UeqScaleScore {
  std::string name;
  double mean = 0;
  double sd = 0;
  int n = 0;
};

std::vector<UeqScaleScore> score_ueq(const std::vector<UeqResponse>& responses, const UeqScaleMap& map);

enum class BenchmarkCategory { excellent, good, above_average, below_average, bad };

std::string to_string(BenchmarkCategory c);

// Lower bounds for Excellent, Good, Above Average, Below Average.
struct BenchmarkTable {
  std::map<std::string, std::array<double, 4>> bounds;

  static BenchmarkTable load(const std::string& path);
  static BenchmarkTable shipped();
};

BenchmarkCategory classify_benchmark(const std::string& scale, double mean, const BenchmarkTable& table);

// Ad-hoc rating items -----------------------------------------------------

// Throws RangeViolation when a rating falls outside [lo, hi].
Summary summarize_ratings(const std::vector<int>& ratings, int lo, int hi);

}  // namespace narravine::questionnaires
