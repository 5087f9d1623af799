#include "frxa/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "frxa/tape.hpp"

namespace frxa {

void TrainConfig::validate() const {
  if (!(lr0 > 0.0) || !std::isfinite(lr0)) throw ConfigError(fmt::format("lr0 must be positive, got {}", lr0));
  if (max_epochs == 0) throw ConfigError("max_epochs must be at least 1");
  if (batch_size == 0) throw ConfigError("batch_size must be at least 1");
  if (runs == 0) throw ConfigError("runs must be at least 1");
  if (!(lr_decay_factor > 0.0 && lr_decay_factor < 1.0)) {
    throw ConfigError(fmt::format("lr_decay_factor must lie in (0, 1), got {}", lr_decay_factor));
  }
  if (lr_patience == 0 || stop_patience == 0) throw ConfigError("patience values must be at least 1");
  if (!(min_lr > 0.0)) throw ConfigError(fmt::format("min_lr must be positive, got {}", min_lr));
  if (!(region_margin >= 0.0)) throw ConfigError("region_margin must be non-negative");
}

nlohmann::json TrainConfig::to_json() const {
  return {{"lr0", lr0},
          {"max_epochs", max_epochs},
          {"batch_size", batch_size},
          {"runs", runs},
          {"lr_decay_factor", lr_decay_factor},
          {"lr_patience", lr_patience},
          {"stop_patience", stop_patience},
          {"min_lr", min_lr},
          {"seed", seed},
          {"augmentation", augmentation},
          {"padding", padding},
          {"region_margin", region_margin}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.lr0 = j.at("lr0").get<double>();
  c.max_epochs = j.at("max_epochs").get<std::size_t>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.runs = j.at("runs").get<std::size_t>();
  c.lr_decay_factor = j.at("lr_decay_factor").get<double>();
  c.lr_patience = j.at("lr_patience").get<std::size_t>();
  c.stop_patience = j.at("stop_patience").get<std::size_t>();
  c.min_lr = j.at("min_lr").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.augmentation = j.at("augmentation").get<bool>();
  c.padding = j.at("padding").get<bool>();
  c.region_margin = j.at("region_margin").get<double>();
  return c;
}

void adam_step(std::span<Parameter<float>* const> params, AdamState& state, double lr) {
  if (!(lr > 0.0)) throw std::invalid_argument(fmt::format("adam_step: lr must be positive, got {}", lr));
  if (state.m.empty() && state.v.empty()) {
    for (const auto* p : params) {
      state.m.emplace_back(p->value.shape());
      state.v.emplace_back(p->value.shape());
    }
  }
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw ShapeError(fmt::format("adam_step: state tracks {} tensors, got {}", state.m.size(), params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Parameter<float>& p = *params[i];
    if (p.grad.shape() != p.value.shape()) throw_shape_mismatch("adam_step gradient", p.grad.shape(), p.value.shape());
    if (state.m[i].shape() != p.value.shape()) throw_shape_mismatch("adam_step moment", state.m[i].shape(), p.value.shape());
  }

  state.t += 1;
  const double b1 = state.beta1, b2 = state.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter<float>& p = *params[i];
    if (!p.trainable) continue;
    auto value = p.value.data();
    auto grad = p.grad.data();
    auto m = state.m[i].data();
    auto v = state.v[i].data();
    for (std::size_t j = 0; j < value.size(); ++j) {
      const double g = grad[j];
      const double mj = b1 * m[j] + (1.0 - b1) * g;
      const double vj = b2 * v[j] + (1.0 - b2) * g * g;
      m[j] = static_cast<float>(mj);
      v[j] = static_cast<float>(vj);
      const double step = lr * (mj / c1) / (std::sqrt(vj / c2) + state.epsilon);
      value[j] = static_cast<float>(value[j] - step);
    }
  }
}

std::string EpochRecord::log_line() const {
  return fmt::format("run={} epoch={} lr={} train_loss={} test_acc={}", run, epoch, lr, train_loss, test_accuracy);
}

PreparedSplit prepare_split(const Dataset& dataset, Split split, Region region, bool padding, double margin) {
  PreparedSplit out;
  for (const LabeledFace* face : dataset.split(split)) {
    out.images.push_back(region_input(face->image, face->landmarks, region, padding, margin));
    out.labels.push_back(face->label);
  }
  return out;
}

Tensor<float> eval_batch(std::span<const GrayImage> images, const Normalization& norm) {
  constexpr std::size_t plane = kInputSide * kInputSide;
  Tensor<float> batch(Shape{images.size(), 1, kInputSide, kInputSide});
  for (std::size_t i = 0; i < images.size(); ++i) {
    const Tensor<float> one = augment_eval(images[i], norm);
    std::copy(one.data().begin(), one.data().end(), batch.data().begin() + static_cast<std::ptrdiff_t>(i * plane));
  }
  return batch;
}

std::vector<int> argmax_rows(const Tensor<float>& scores) {
  const std::size_t classes = scores.shape().per_sample();
  std::vector<int> out(scores.shape().n);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto row = scores.data().subspan(i * classes, classes);
    out[i] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

double accuracy(std::span<const int> predicted, std::span<const int> labels) {
  if (predicted.size() != labels.size()) throw std::invalid_argument("accuracy: prediction/label count mismatch");
  if (labels.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) correct += predicted[i] == labels[i] ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

namespace {

double evaluate_accuracy(Model& model, const Tensor<float>& batch, std::span<const int> labels) {
  return accuracy(argmax_rows(model.predict(batch)), labels);
}

struct RunOutcome {
  std::vector<Tensor<float>> best_values;
  RunSummary summary;
};

RunOutcome train_one(const ArchitectureConfig& architecture, const PreparedSplit& train_split,
                     const Tensor<float>& test_batch, std::span<const int> test_labels, const Normalization& norm,
                     const TrainConfig& config, std::size_t run, std::vector<EpochRecord>& log,
                     const EpochCallback& on_epoch) {
  const std::uint64_t seed = config.seed + run;
  Model model = Model::build(architecture, seed);
  const auto params = model.parameters();
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  AdamState adam;

  RunOutcome out;
  out.summary.run = run;
  out.summary.seed = seed;
  out.summary.best_test_accuracy = -1.0;
  double lr = config.lr0;
  std::size_t since_best = 0;
  std::size_t since_decay = 0;

  constexpr std::size_t plane = kInputSide * kInputSide;
  const std::size_t n = train_split.images.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t count = std::min(config.batch_size, n - start);
      Tensor<float> batch(Shape{count, 1, kInputSide, kInputSide});
      std::vector<int> labels(count);
      for (std::size_t i = 0; i < count; ++i) {
        const std::size_t idx = order[start + i];
        const Tensor<float> view = config.augmentation ? augment_train(train_split.images[idx], norm, rng)
                                                       : augment_eval(train_split.images[idx], norm);
        std::copy(view.data().begin(), view.data().end(), batch.data().begin() + static_cast<std::ptrdiff_t>(i * plane));
        labels[i] = train_split.labels[idx];
      }
      Tape<float> tape;
      const auto result = model.forward(tape.input(std::move(batch)), Mode::training);
      const auto loss = ops::softmax_cross_entropy(result.logits, labels);
      const float value = loss.loss.value()[0];
      if (!std::isfinite(value)) {
        throw DivergenceError(fmt::format("loss became {} in run {} epoch {} (lr {})", value, run, epoch, lr));
      }
      loss_sum += static_cast<double>(value) * static_cast<double>(count);
      tape.backward(loss.loss);
      adam_step(params, adam, lr);
      model.zero_grad();
    }

    EpochRecord record{run, epoch, lr, loss_sum / static_cast<double>(n),
                       evaluate_accuracy(model, test_batch, test_labels)};
    log.push_back(record);
    if (on_epoch) on_epoch(record);
    out.summary.epochs = epoch;

    if (record.test_accuracy > out.summary.best_test_accuracy) {
      out.summary.best_test_accuracy = record.test_accuracy;
      out.summary.best_epoch = epoch;
      out.best_values.clear();
      for (const auto* p : params) out.best_values.push_back(p->value);
      since_best = 0;
      since_decay = 0;
      continue;
    }
    ++since_best;
    ++since_decay;
    if (since_best >= config.stop_patience) break;
    if (since_decay >= config.lr_patience) {
      lr = std::max(lr * config.lr_decay_factor, config.min_lr);
      since_decay = 0;
    }
  }
  return out;
}

std::size_t class_count(const ArchitectureConfig& architecture) {
  return std::visit([](const auto& c) { return c.num_classes; }, architecture);
}

}  // namespace

TrainResult train(const ArchitectureConfig& architecture, const Dataset& dataset, Region region,
                  const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  std::visit([](const auto& c) { c.validate(); }, architecture);
  if (class_count(architecture) != dataset.class_names.size()) {
    throw ConfigError(fmt::format("architecture has {} classes, dataset has {}", class_count(architecture),
                                  dataset.class_names.size()));
  }
  const PreparedSplit train_split = prepare_split(dataset, Split::train, region, config.padding, config.region_margin);
  const PreparedSplit test_split = prepare_split(dataset, Split::test, region, config.padding, config.region_margin);
  if (train_split.images.empty()) throw EmptyDatasetError("dataset has no training samples");
  if (test_split.images.empty()) throw EmptyDatasetError("dataset has no test samples for model selection");

  const Normalization norm = compute_normalization(train_split.images);
  const Tensor<float> test_batch = eval_batch(test_split.images, norm);

  TrainResult result;
  std::vector<RunOutcome> outcomes;
  for (std::size_t run = 0; run < config.runs; ++run) {
    outcomes.push_back(train_one(architecture, train_split, test_batch, test_split.labels, norm, config, run,
                                 result.log, on_epoch));
    result.runs.push_back(outcomes.back().summary);
  }
  for (std::size_t run = 1; run < outcomes.size(); ++run) {
    if (outcomes[run].summary.best_test_accuracy > outcomes[result.best_run].summary.best_test_accuracy) {
      result.best_run = run;
    }
  }

  Model best = Model::build(architecture, config.seed + result.best_run);
  const auto params = best.parameters();
  const auto& values = outcomes[result.best_run].best_values;
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = values[i];
  result.train_accuracy = evaluate_accuracy(best, eval_batch(train_split.images, norm), train_split.labels);

  ModelCheckpoint& ckpt = result.checkpoint;
  ckpt = ModelCheckpoint::capture(best);
  ckpt.class_names = dataset.class_names;
  ckpt.region = region;
  ckpt.padding = config.padding;
  ckpt.region_margin = config.region_margin;
  ckpt.normalization = norm;
  ckpt.best_test_accuracy = outcomes[result.best_run].summary.best_test_accuracy;
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : result.runs) {
    runs.push_back({{"run", r.run},
                    {"seed", r.seed},
                    {"epochs", r.epochs},
                    {"best_epoch", r.best_epoch},
                    {"best_test_accuracy", r.best_test_accuracy}});
  }
  ckpt.training = {{"config", config.to_json()},
                   {"dataset", dataset.name},
                   {"train_samples", train_split.images.size()},
                   {"test_samples", test_split.images.size()},
                   {"runs", runs},
                   {"best_run", result.best_run},
                   {"train_accuracy", result.train_accuracy}};
  return result;
}

}  // namespace frxa
