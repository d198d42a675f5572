#include "narravine/perception/linear.hpp"

#include <cmath>
#include <random>

#include "narravine/common/error.hpp"

namespace narravine::perception {

double LinearSvm::decision(const std::vector<double>& x) const {
  if (x.size() != weights.size()) throw PreconditionViolation("feature length mismatch");
  double acc = bias;
  for (std::size_t i = 0; i < x.size(); ++i) acc += weights[i] * (x[i] - mean[i]) / scale[i];
  return acc;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

LinearSvm train_linear_svm(const std::vector<std::vector<double>>& samples,
                           const std::vector<int>& labels, const SvmTraining& opts) {
  if (samples.empty() || samples.size() != labels.size()) {
    throw PreconditionViolation("svm training needs matching non-empty samples and labels");
  }
  const std::size_t dim = samples.front().size();
  const std::size_t n = samples.size();

  LinearSvm m;
  m.mean.assign(dim, 0.0);
  m.scale.assign(dim, 0.0);
  for (const auto& s : samples) {
    if (s.size() != dim) throw PreconditionViolation("ragged training samples");
    for (std::size_t i = 0; i < dim; ++i) m.mean[i] += s[i];
  }
  for (auto& v : m.mean) v /= static_cast<double>(n);
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < dim; ++i) m.scale[i] += (s[i] - m.mean[i]) * (s[i] - m.mean[i]);
  }
  for (auto& v : m.scale) {
    v = std::sqrt(v / static_cast<double>(n));
    if (v < 1e-9) v = 1.0;
  }

  std::vector<std::vector<double>> z(n, std::vector<double>(dim));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < dim; ++i) z[r][i] = (samples[r][i] - m.mean[i]) / m.scale[i];
  }

  m.weights.assign(dim, 0.0);
  std::mt19937_64 rng(opts.seed);
  // draw each class half the time so a few positives are not swamped by negatives
  std::vector<std::size_t> pos, neg;
  for (std::size_t r = 0; r < n; ++r) (labels[r] > 0 ? pos : neg).push_back(r);
  auto pick = [&]() -> std::size_t {
    if (pos.empty() || neg.empty()) return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    const auto& side = (rng() & 1) ? pos : neg;
    return side[std::uniform_int_distribution<std::size_t>(0, side.size() - 1)(rng)];
  };
  const std::size_t steps = static_cast<std::size_t>(opts.epochs) * n;
  for (std::size_t t = 1; t <= steps; ++t) {
    const std::size_t r = pick();
    const double eta = 1.0 / (opts.lambda * static_cast<double>(t));
    double margin = m.bias;
    for (std::size_t i = 0; i < dim; ++i) margin += m.weights[i] * z[r][i];
    margin *= labels[r];
    const double shrink = 1.0 - eta * opts.lambda;
    for (auto& w : m.weights) w *= shrink;
    if (margin < 1.0) {
      for (std::size_t i = 0; i < dim; ++i) m.weights[i] += eta * labels[r] * z[r][i];
      m.bias += eta * labels[r] * 0.1;
    }
  }
  return m;
}

void to_json(Json& j, const LinearSvm& m) {
  j = Json{{"weights", m.weights}, {"bias", m.bias}, {"mean", m.mean}, {"scale", m.scale}};
}

void from_json(const Json& j, LinearSvm& m) {
  j.at("weights").get_to(m.weights);
  j.at("bias").get_to(m.bias);
  j.at("mean").get_to(m.mean);
  j.at("scale").get_to(m.scale);
}

}  // namespace narravine::perception
