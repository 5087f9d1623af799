#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "frxa/augment.hpp"
#include "frxa/checkpoint.hpp"
#include "frxa/dataset.hpp"
#include "frxa/models.hpp"

namespace frxa {

/// Loss became NaN or infinite.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No usable train or test samples.
class EmptyDatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  double lr0 = 0.05;
  std::size_t max_epochs = 100;
  std::size_t batch_size = 32;
  std::size_t runs = 5;
  double lr_decay_factor = 0.5;
  std::size_t lr_patience = 3;
  std::size_t stop_patience = 10;
  double min_lr = 1e-5;
  std::uint64_t seed = 0;
  bool augmentation = true;
  bool padding = true;
  double region_margin = kDefaultRegionMargin;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
  [[nodiscard]] nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t t = 0;
  std::vector<Tensor<float>> m;
  std::vector<Tensor<float>> v;
};

/// One bias-corrected Adam update of every trainable parameter from its `grad`.
/// Moments are created on the first call; shape changes afterwards throw ShapeError.
void adam_step(std::span<Parameter<float>* const> params, AdamState& state, double lr);

struct EpochRecord {
  std::size_t run = 0;
  std::size_t epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double test_accuracy = 0.0;

  [[nodiscard]] std::string log_line() const;
};

struct RunSummary {
  std::size_t run = 0;
  std::uint64_t seed = 0;
  std::size_t epochs = 0;
  std::size_t best_epoch = 0;
  double best_test_accuracy = 0.0;
};

struct TrainResult {
  ModelCheckpoint checkpoint;
  std::vector<EpochRecord> log;
  std::vector<RunSummary> runs;
  std::size_t best_run = 0;
  double train_accuracy = 0.0;  // selected checkpoint, eval preprocessing
};

/// Region inputs of one split after cropping/padding, ready for augmentation.
struct PreparedSplit {
  std::vector<GrayImage> images;
  std::vector<int> labels;
};

PreparedSplit prepare_split(const Dataset& dataset, Split split, Region region, bool padding, double margin);
/// Eval-preprocessed batch (N, 1, 64, 64) of every image.
Tensor<float> eval_batch(std::span<const GrayImage> images, const Normalization& norm);
/// Argmax per row of an (N, C, 1, 1) tensor, lowest index on ties.
std::vector<int> argmax_rows(const Tensor<float>& scores);
double accuracy(std::span<const int> predicted, std::span<const int> labels);

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Trains `config.runs` models with seeds config.seed + run and returns the best one by test
/// accuracy (earliest run on ties). The architecture's class count must match the dataset.
TrainResult train(const ArchitectureConfig& architecture, const Dataset& dataset, Region region,
                  const TrainConfig& config, const EpochCallback& on_epoch = {});

}  // namespace frxa
