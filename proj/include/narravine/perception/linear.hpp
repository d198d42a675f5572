#pragma once

#include <cstdint>
#include <vector>

#include "narravine/common/json.hpp"

namespace narravine::perception {

// Linear hinge-loss classifier trained with Pegasos. Features are
// standardized with the training mean/std before the dot product.
struct LinearSvm {
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<double> mean;
  std::vector<double> scale;

  double decision(const std::vector<double>& x) const;
};

struct SvmTraining {
  double lambda = 1e-3;
  int epochs = 40;
  std::uint64_t seed = 17;
};

// labels are +1 / -1
LinearSvm train_linear_svm(const std::vector<std::vector<double>>& samples,
                           const std::vector<int>& labels, const SvmTraining& opts = {});

double sigmoid(double x);

void to_json(Json& j, const LinearSvm& m);
void from_json(const Json& j, LinearSvm& m);

}  // namespace narravine::perception
