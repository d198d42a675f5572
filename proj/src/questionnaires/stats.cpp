#include "narravine/questionnaires/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace narravine::questionnaires {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 10000;

// P(a, x) by its power series, good for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIter; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by Lentz's continued fraction, good for x >= a + 1.
double gamma_q_fraction(double a, double x) {
  const double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_q(double a, double x) {
  if (a <= 0) throw PreconditionViolation("gamma shape must be positive");
  if (x <= 0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_fraction(a, x);
}

double chi_square_survival(double chi2, int df) {
  if (df < 1) throw PreconditionViolation("chi-square needs df >= 1");
  return regularized_gamma_q(df / 2.0, chi2 / 2.0);
}

double two_sided_normal_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

ChiSquareResult chi_square_gof(const CategoricalVotes& votes, const std::vector<double>& expected) {
  const std::size_t k = votes.counts.size();
  if (k != votes.categories.size() && !votes.categories.empty()) {
    throw PreconditionViolation("counts and categories differ in length");
  }
  if (k < 2) throw PreconditionViolation("goodness of fit needs at least two categories");
  for (int c : votes.counts) {
    if (c < 0) throw PreconditionViolation("negative count");
  }
  std::vector<double> e = expected;
  if (e.empty()) {
    const double total = std::accumulate(votes.counts.begin(), votes.counts.end(), 0.0);
    e.assign(k, total / static_cast<double>(k));
  }
  if (e.size() != k) throw PreconditionViolation("expected counts differ in length");
  ChiSquareResult r;
  for (std::size_t i = 0; i < k; ++i) {
    if (!(e[i] > 0)) throw ZeroExpected("expected count for cell " + std::to_string(i) + " is not positive");
    const double d = votes.counts[i] - e[i];
    r.chi2 += d * d / e[i];
  }
  r.df = static_cast<int>(k) - 1;
  r.p = chi_square_survival(r.chi2, r.df);
  return r;
}

ZTest two_proportion_z(const ProportionGroup& a, const ProportionGroup& b) {
  for (const auto* g : {&a, &b}) {
    if (g->n <= 0) throw DegenerateGroup("group " + g->label + " has no respondents");
    if (g->successes < 0 || g->successes > g->n) throw PreconditionViolation("successes outside 0..n");
  }
  const double p1 = static_cast<double>(a.successes) / a.n;
  const double p2 = static_cast<double>(b.successes) / b.n;
  const double pooled = static_cast<double>(a.successes + b.successes) / (a.n + b.n);
  const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / a.n + 1.0 / b.n));
  if (se == 0.0) return {0.0, 1.0};
  const double z = (p1 - p2) / se;
  return {z, two_sided_normal_p(z)};
}

std::vector<double> holm_adjust(const std::vector<double>& p) {
  const std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return p[x] < p[y]; });
  std::vector<double> out(m);
  double running = 0;
  for (std::size_t rank = 0; rank < m; ++rank) {
    running = std::max(running, static_cast<double>(m - rank) * p[order[rank]]);
    out[order[rank]] = std::min(1.0, running);
  }
  return out;
}

PairwiseResult pairwise_proportion_tests(const std::vector<ProportionGroup>& groups) {
  const std::size_t k = groups.size();
  PairwiseResult r;
  for (const auto& g : groups) {
    if (g.n <= 0) throw DegenerateGroup("group " + g.label + " has no respondents");
    r.labels.push_back(g.label);
  }
  r.z.assign(k, std::vector<double>(k, 0.0));
  r.raw_p.assign(k, std::vector<double>(k, 1.0));
  r.adjusted_p.assign(k, std::vector<double>(k, 1.0));
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<double> raw;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const auto t = two_proportion_z(groups[i], groups[j]);
      r.z[i][j] = t.z;
      r.z[j][i] = -t.z;
      r.raw_p[i][j] = r.raw_p[j][i] = t.p;
      pairs.emplace_back(i, j);
      raw.push_back(t.p);
    }
  }
  const auto adj = holm_adjust(raw);
  for (std::size_t n = 0; n < pairs.size(); ++n) {
    const auto [i, j] = pairs[n];
    r.adjusted_p[i][j] = r.adjusted_p[j][i] = adj[n];
  }
  return r;
}

void to_json(Json& j, const ChiSquareResult& r) { j = Json{{"chi2", r.chi2}, {"df", r.df}, {"p", r.p}}; }

void to_json(Json& j, const PairwiseResult& r) {
  j = Json{{"labels", r.labels}, {"z", r.z}, {"raw_p", r.raw_p}, {"adjusted_p", r.adjusted_p}};
}

}  // namespace narravine::questionnaires
