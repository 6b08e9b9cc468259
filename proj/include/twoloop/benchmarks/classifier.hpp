#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace twoloop::benchmarks {

/// Synthetic Gaussian-blob classification set. Each feature row ends with a
/// constant 1 acting as the bias input.
struct ClassifierData {
  std::vector<std::vector<double>> features;
  std::vector<std::vector<double>> labels;
  std::size_t classes = 0;

  std::size_t inputs() const { return features.empty() ? 0 : features.front().size(); }
};

struct BlobSpec {
  std::size_t classes = 3;
  std::size_t samples_per_class = 30;
  /// Blob centers sit at `separation` along one feature axis per class.
  double separation = 3.0;
  double spread = 0.5;
  std::uint64_t seed = 7;
};

/// Features have `classes` coordinates plus the bias input.
ClassifierData make_blobs(const BlobSpec& spec);

/// Softmax of features * W per sample; W is inputs x classes row-major.
std::vector<std::vector<double>> classifier_predictions(const ClassifierData& data,
                                                        std::span<const double> weights);

/// mse_fitness of the predictions against the one-hot labels.
double classifier_fitness(const ClassifierData& data, std::span<const double> weights);

}  // namespace twoloop::benchmarks
