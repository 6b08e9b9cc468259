#include "twoloop/benchmarks/classifier.hpp"

#include <algorithm>

#include "twoloop/benchmarks/formulas.hpp"
#include "twoloop/core/error.hpp"
#include "twoloop/core/rng.hpp"

namespace twoloop::benchmarks {

ClassifierData make_blobs(const BlobSpec& spec) {
  if (spec.classes < 2) throw config_error("classifier needs at least 2 classes");
  if (spec.samples_per_class < 1) throw config_error("classifier needs at least 1 sample per class");
  ClassifierData data;
  data.classes = spec.classes;
  Rng rng(spec.seed);
  for (std::size_t i = 0; i < spec.samples_per_class; ++i) {
    for (std::size_t c = 0; c < spec.classes; ++c) {
      std::vector<double> x(spec.classes + 1, 0.0);
      for (std::size_t k = 0; k < spec.classes; ++k) {
        x[k] = (k == c ? spec.separation : 0.0) + rng.normal(0.0, spec.spread);
      }
      x.back() = 1.0;
      std::vector<double> y(spec.classes, 0.0);
      y[c] = 1.0;
      data.features.push_back(std::move(x));
      data.labels.push_back(std::move(y));
    }
  }
  return data;
}

std::vector<std::vector<double>> classifier_predictions(const ClassifierData& data,
                                                        std::span<const double> weights) {
  const std::size_t in = data.inputs();
  const std::size_t c = data.classes;
  if (weights.size() != in * c) {
    throw config_error("classifier needs " + std::to_string(in * c) + " weights, got " +
                       std::to_string(weights.size()));
  }
  std::vector<std::vector<double>> out;
  out.reserve(data.features.size());
  std::vector<double> logits(c);
  for (const auto& x : data.features) {
    std::fill(logits.begin(), logits.end(), 0.0);
    for (std::size_t i = 0; i < in; ++i) {
      for (std::size_t k = 0; k < c; ++k) logits[k] += x[i] * weights[i * c + k];
    }
    out.push_back(softmax(logits));
  }
  return out;
}

double classifier_fitness(const ClassifierData& data, std::span<const double> weights) {
  return mse_fitness(classifier_predictions(data, weights), data.labels);
}

}  // namespace twoloop::benchmarks
