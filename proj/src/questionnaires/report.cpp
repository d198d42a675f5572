#include "narravine/questionnaires/report.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "narravine/common/text.hpp"

namespace narravine::questionnaires {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(text::trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(text::trim(cur));
  return cells;
}

int to_int(const std::string& cell, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw RangeViolation(what + ": not an integer: '" + cell + "'");
  }
}

std::vector<int> int_columns(const CsvTable& t, const std::vector<std::string>& row, const std::string& prefix,
                             int count) {
  std::vector<int> out;
  for (int i = 1; i <= count; ++i) {
    const auto name = prefix + std::to_string(i);
    const int c = t.column(name);
    if (c < 0) throw RangeViolation("missing column " + name);
    out.push_back(to_int(row.at(c), name));
  }
  return out;
}

bool yes(const std::string& cell) {
  const auto v = text::to_lower(cell);
  return v == "yes" || v == "y" || v == "true" || v == "1";
}

Json share(int k, int n) { return Json{{"count", k}, {"n", n}, {"share", n ? static_cast<double>(k) / n : 0.0}}; }

const std::vector<std::string> kComfort{"not at all", "slightly", "moderately", "pretty", "fully"};

Json analyze_adhoc2(const CsvTable& t) {
  Json out;
  const int n = static_cast<int>(t.rows.size());
  auto col = [&](const char* name) {
    const int c = t.column(name);
    if (c < 0) throw RangeViolation(std::string("adhoc2: missing column ") + name);
    return c;
  };

  std::map<std::string, int> comfort;
  for (const auto& l : kComfort) comfort[l] = 0;
  int comfortable = 0;
  for (const auto& r : t.rows) {
    const auto v = text::to_lower(r.at(col("comfort")));
    if (!comfort.count(v)) throw RangeViolation("adhoc2: unknown comfort level '" + v + "'");
    ++comfort[v];
    comfortable += v == "pretty" || v == "fully";
  }
  out["comfort"] = {{"distribution", comfort}, {"pretty_or_fully", share(comfortable, n)}};

  int stickers = 0, turns = 0, again = 0;
  std::vector<double> turns_needed;
  std::vector<int> enjoyment;
  for (const auto& r : t.rows) {
    stickers += yes(r.at(col("stickers_enough")));
    turns += yes(r.at(col("turns_enough")));
    again += yes(r.at(col("play_again")));
    if (const auto& tn = r.at(col("turns_needed")); !tn.empty()) turns_needed.push_back(to_int(tn, "turns_needed"));
    enjoyment.push_back(to_int(r.at(col("enjoyment")), "enjoyment"));
  }
  out["stickers_enough"] = share(stickers, n);
  out["turns_enough"] = share(turns, n);
  out["wanted_more_turns"] = share(n - turns, n);
  if (!turns_needed.empty()) out["turns_needed"] = summarize(turns_needed);
  out["enjoyment"] = summarize_ratings(enjoyment, 1, 10);
  out["play_again"] = share(again, n);

  const auto& cats = audience_categories();
  CategoricalVotes votes{cats, std::vector<int>(cats.size(), 0), n};
  for (const auto& r : t.rows) {
    for (const auto& pick : text::split(r.at(col("audience")), ';')) {
      const auto v = text::trim(pick);
      if (v.empty()) continue;
      auto it = std::find(cats.begin(), cats.end(), v);
      if (it == cats.end()) throw RangeViolation("adhoc2: unknown audience '" + v + "'");
      ++votes.counts[it - cats.begin()];
    }
  }
  std::vector<ProportionGroup> groups;
  Json shares = Json::object();
  for (std::size_t i = 0; i < cats.size(); ++i) {
    groups.push_back({cats[i], votes.counts[i], n});
    shares[cats[i]] = share(votes.counts[i], n);
  }
  out["audience"] = {{"votes", shares}, {"chi_square", chi_square_gof(votes)},
                     {"pairwise", pairwise_proportion_tests(groups)}};
  return out;
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

CsvTable parse_csv(const std::string& content) {
  CsvTable t;
  std::istringstream in(content);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    auto cells = split_row(line);
    if (first) {
      t.header = std::move(cells);
      first = false;
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw RangeViolation("csv row has " + std::to_string(cells.size()) + " cells, header has " +
                           std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  if (first) throw EmptyInput("csv has no header");
  return t;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

std::vector<SusResponse> sus_from_csv(const CsvTable& t) {
  std::vector<SusResponse> out;
  for (const auto& r : t.rows) out.push_back(make_sus(int_columns(t, r, "q", 10)));
  return out;
}

std::vector<UeqResponse> ueq_from_csv(const CsvTable& t) {
  std::vector<UeqResponse> out;
  for (const auto& r : t.rows) out.push_back({int_columns(t, r, "i", kUeqItems)});
  return out;
}

const std::vector<std::string>& audience_categories() {
  static const std::vector<std::string> cats{"under 10", "10-20", "20-30", "30-50", "50-70", "over 70"};
  return cats;
}

Json ueq_plot_data(const std::vector<UeqScaleScore>& scores, const BenchmarkTable& bench) {
  Json out = Json::array();
  for (const auto& s : scores) {
    Json row{{"scale", s.name}, {"mean", s.mean}, {"sd", s.sd}};
    if (auto it = bench.bounds.find(s.name); it != bench.bounds.end()) {
      const auto& b = it->second;
      row["bands"] = {{"Bad", {-3.0, b[3]}},           {"Below Average", {b[3], b[2]}},
                      {"Above Average", {b[2], b[1]}}, {"Good", {b[1], b[0]}},
                      {"Excellent", {b[0], 3.0}}};
      row["category"] = to_string(classify_benchmark(s.name, s.mean, bench));
    }
    out.push_back(row);
  }
  return out;
}

Json analyze_questionnaires(const fs::path& dir, const UeqScaleMap& map, const BenchmarkTable& bench) {
  Json report = Json::object();
  if (fs::exists(dir / "sus.csv")) {
    std::vector<double> scores;
    for (const auto& r : sus_from_csv(read_csv((dir / "sus.csv").string()))) scores.push_back(score_sus(r));
    report["sus"] = {{"summary", summarize(scores)}, {"scores", scores}};
  }
  if (fs::exists(dir / "ueq.csv")) {
    const auto scores = score_ueq(ueq_from_csv(read_csv((dir / "ueq.csv").string())), map);
    report["ueq"] = ueq_plot_data(scores, bench);
  }
  if (fs::exists(dir / "adhoc1.csv")) {
    const auto t = read_csv((dir / "adhoc1.csv").string());
    std::vector<int> like, coh;
    const int lc = t.column("likability"), cc = t.column("coherence");
    if (lc < 0 || cc < 0) throw RangeViolation("adhoc1 needs likability and coherence columns");
    for (const auto& r : t.rows) {
      like.push_back(to_int(r[lc], "likability"));
      coh.push_back(to_int(r[cc], "coherence"));
    }
    report["adhoc1"] = {{"likability", summarize_ratings(like, 1, 10)}, {"coherence", summarize_ratings(coh, 1, 10)}};
  }
  if (fs::exists(dir / "adhoc2.csv")) report["adhoc2"] = analyze_adhoc2(read_csv((dir / "adhoc2.csv").string()));
  return report;
}

}  // namespace narravine::questionnaires
