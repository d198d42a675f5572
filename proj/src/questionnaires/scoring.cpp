#include "narravine/questionnaires/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "narravine/common/paths.hpp"

namespace narravine::questionnaires {

namespace {

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot read " + path);
  try {
    Json j;
    in >> j;
    return j;
  } catch (const Json::exception& e) {
    throw IoFailure(path + ": " + e.what());
  }
}

}  // namespace

Summary summarize(const std::vector<double>& values) {
  if (values.empty()) throw EmptyInput("nothing to summarize");
  Summary s;
  s.n = static_cast<int>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / s.n;
  double ss = 0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = s.n > 1 ? std::sqrt(ss / (s.n - 1)) : 0.0;
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

void to_json(Json& j, const Summary& s) {
  j = Json{{"n", s.n}, {"mean", s.mean}, {"sd", s.sd}, {"min", s.min}, {"max", s.max}};
}

SusResponse make_sus(const std::vector<int>& items) {
  if (items.size() != 10) throw RangeViolation("SUS needs exactly 10 items, got " + std::to_string(items.size()));
  SusResponse r;
  std::copy(items.begin(), items.end(), r.items.begin());
  return r;
}

double score_sus(const SusResponse& r) {
  int total = 0;
  for (int i = 0; i < 10; ++i) {
    const int v = r.items[i];
    if (v < 1 || v > 5) throw RangeViolation("SUS item " + std::to_string(i + 1) + " out of 1..5");
    total += (i % 2 == 0) ? v - 1 : 5 - v;  // item 1 is odd
  }
  return total * 2.5;
}

UeqScaleMap UeqScaleMap::load(const std::string& path) {
  const Json j = read_json(path);
  UeqScaleMap m;
  for (const auto& s : j.at("scales")) m.scales.push_back({s.at("name"), s.at("items").get<std::vector<int>>()});
  for (int item : j.value("reversed", std::vector<int>{})) m.reversed.insert(item);
  std::set<int> seen;
  for (const auto& s : m.scales) {
    if (s.items.empty()) throw PreconditionViolation("UEQ scale " + s.name + " has no items");
    for (int item : s.items) {
      if (item < 1 || item > kUeqItems || !seen.insert(item).second) {
        throw PreconditionViolation("UEQ map: bad or repeated item " + std::to_string(item));
      }
    }
  }
  return m;
}

UeqScaleMap UeqScaleMap::shipped() { return load(data_path("ueq_scales.json")); }

int UeqScaleMap::keyed(int item, int raw) const { return reversed.count(item) ? 4 - raw : raw - 4; }

std::vector<UeqScaleScore> score_ueq(const std::vector<UeqResponse>& responses, const UeqScaleMap& map) {
  if (responses.empty()) throw EmptyInput("no UEQ responses");
  std::vector<std::vector<double>> per_scale(map.scales.size());
  for (const auto& r : responses) {
    if (r.items.size() != kUeqItems) throw RangeViolation("UEQ response needs 26 items");
    for (int v : r.items) {
      if (v < 1 || v > 7) throw RangeViolation("UEQ item out of 1..7");
    }
    for (std::size_t s = 0; s < map.scales.size(); ++s) {
      double sum = 0;
      for (int item : map.scales[s].items) sum += map.keyed(item, r.items[item - 1]);
      per_scale[s].push_back(sum / static_cast<double>(map.scales[s].items.size()));
    }
  }
  std::vector<UeqScaleScore> out;
  for (std::size_t s = 0; s < map.scales.size(); ++s) {
    const auto sum = summarize(per_scale[s]);
    out.push_back({map.scales[s].name, sum.mean, sum.sd, sum.n});
  }
  return out;
}

std::string to_string(BenchmarkCategory c) {
  switch (c) {
    case BenchmarkCategory::excellent: return "Excellent";
    case BenchmarkCategory::good: return "Good";
    case BenchmarkCategory::above_average: return "Above Average";
    case BenchmarkCategory::below_average: return "Below Average";
    case BenchmarkCategory::bad: return "Bad";
  }
  return "Bad";
}

BenchmarkTable BenchmarkTable::load(const std::string& path) {
  const Json j = read_json(path);
  BenchmarkTable t;
  for (const auto& [scale, b] : j.at("scales").items()) {
    t.bounds[scale] = {b.at("excellent"), b.at("good"), b.at("above_average"), b.at("below_average")};
  }
  return t;
}

BenchmarkTable BenchmarkTable::shipped() { return load(data_path("ueq_benchmark.json")); }

BenchmarkCategory classify_benchmark(const std::string& scale, double mean, const BenchmarkTable& table) {
  auto it = table.bounds.find(scale);
  if (it == table.bounds.end()) throw UnknownScale("no benchmark for scale " + scale);
  const auto& b = it->second;
  if (mean >= b[0]) return BenchmarkCategory::excellent;
  if (mean >= b[1]) return BenchmarkCategory::good;
  if (mean >= b[2]) return BenchmarkCategory::above_average;
  if (mean >= b[3]) return BenchmarkCategory::below_average;
  return BenchmarkCategory::bad;
}

Summary summarize_ratings(const std::vector<int>& ratings, int lo, int hi) {
  std::vector<double> vals;
  for (int r : ratings) {
    if (r < lo || r > hi) {
      throw RangeViolation("rating " + std::to_string(r) + " outside " + std::to_string(lo) + ".." +
                           std::to_string(hi));
    }
    vals.push_back(r);
  }
  return summarize(vals);
}

}  // namespace narravine::questionnaires
