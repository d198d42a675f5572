#pragma once

#include <optional>
#include <string>
#include <vector>

#include "narravine/common/json.hpp"
#include "narravine/questionnaires/errors.hpp"

namespace narravine::questionnaires {

// Q(a, x) = Γ(a, x) / Γ(a)
double regularized_gamma_q(double a, double x);
double chi_square_survival(double chi2, int df);
double two_sided_normal_p(double z);

struct CategoricalVotes {
  std::vector<std::string> categories;
  std::vector<int> counts;
  int n_respondents = 0;
};

struct ChiSquareResult {
  double chi2 = 0;
  int df = 0;
  double p = 1;
};

// Uniform expectation when `expected` is empty.
ChiSquareResult chi_square_gof(const CategoricalVotes& votes, const std::vector<double>& expected = {});

struct ProportionGroup {
  std::string label;
  int successes = 0;
  int n = 0;
};

struct ZTest {
  double z = 0;
  double p = 1;
};

ZTest two_proportion_z(const ProportionGroup& a, const ProportionGroup& b);
std::vector<double> holm_adjust(const std::vector<double>& p);

struct PairwiseResult {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> z;
  std::vector<std::vector<double>> raw_p;
  std::vector<std::vector<double>> adjusted_p;
};

PairwiseResult pairwise_proportion_tests(const std::vector<ProportionGroup>& groups);

void to_json(Json& j, const ChiSquareResult& r);
void to_json(Json& j, const PairwiseResult& r);

}  // namespace narravine::questionnaires
