#include "frxa/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "frxa/training.hpp"

namespace frxa {

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> class_names)
    : class_names_(std::move(class_names)), counts_(class_names_.size() * class_names_.size(), 0) {}

void ConfusionMatrix::add(int truth, int predicted) {
  const auto n = static_cast<int>(size());
  if (truth < 0 || truth >= n || predicted < 0 || predicted >= n) {
    throw std::out_of_range(fmt::format("confusion entry ({}, {}) outside {} classes", truth, predicted, n));
  }
  counts_[static_cast<std::size_t>(truth) * size() + static_cast<std::size_t>(predicted)] += 1;
}

std::size_t ConfusionMatrix::support(std::size_t truth) const {
  std::size_t s = 0;
  for (std::size_t p = 0; p < size(); ++p) s += count(truth, p);
  return s;
}

std::size_t ConfusionMatrix::total() const {
  std::size_t s = 0;
  for (auto c : counts_) s += c;
  return s;
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t s = 0;
  for (std::size_t i = 0; i < size(); ++i) s += count(i, i);
  return s;
}

double ConfusionMatrix::accuracy() const {
  const std::size_t t = total();
  return t == 0 ? 0.0 : static_cast<double>(trace()) / static_cast<double>(t);
}

std::vector<std::vector<double>> ConfusionMatrix::normalized_rows() const {
  std::vector<std::vector<double>> out(size(), std::vector<double>(size(), 0.0));
  for (std::size_t t = 0; t < size(); ++t) {
    const std::size_t s = support(t);
    if (s == 0) continue;
    for (std::size_t p = 0; p < size(); ++p) out[t][p] = static_cast<double>(count(t, p)) / static_cast<double>(s);
  }
  return out;
}

ConfusionMatrix ConfusionMatrix::masked(const std::vector<std::string>& hidden) const {
  std::vector<std::size_t> keep;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < size(); ++i) {
    if (std::find(hidden.begin(), hidden.end(), class_names_[i]) == hidden.end()) {
      keep.push_back(i);
      names.push_back(class_names_[i]);
    }
  }
  ConfusionMatrix out(names);
  for (std::size_t a = 0; a < keep.size(); ++a) {
    for (std::size_t b = 0; b < keep.size(); ++b) out.counts_[a * keep.size() + b] = count(keep[a], keep[b]);
  }
  return out;
}

ConfusionMatrix ConfusionMatrix::permuted(const std::vector<std::size_t>& permutation) const {
  if (permutation.size() != size()) throw std::invalid_argument("permuted: permutation size differs from class count");
  std::vector<std::string> names(size());
  for (std::size_t i = 0; i < size(); ++i) names.at(permutation[i]) = class_names_[i];
  ConfusionMatrix out(names);
  for (std::size_t t = 0; t < size(); ++t) {
    for (std::size_t p = 0; p < size(); ++p) out.counts_[permutation[t] * size() + permutation[p]] = count(t, p);
  }
  return out;
}

nlohmann::json ConfusionMatrix::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t t = 0; t < size(); ++t) {
    std::vector<std::size_t> row(counts_.begin() + static_cast<std::ptrdiff_t>(t * size()),
                                 counts_.begin() + static_cast<std::ptrdiff_t>((t + 1) * size()));
    rows.push_back(row);
  }
  return {{"classes", class_names_},
          {"counts", rows},
          {"normalized", normalized_rows()},
          {"total", total()},
          {"correct", trace()},
          {"accuracy", accuracy()}};
}

std::string ConfusionMatrix::to_text() const {
  std::size_t width = 8;
  for (const auto& name : class_names_) width = std::max(width, name.size() + 1);
  std::string out = fmt::format("{:<{}}", "true\\pred", width);
  for (const auto& name : class_names_) out += fmt::format(" {:>{}}", name, width);
  out += '\n';
  const auto norm = normalized_rows();
  for (std::size_t t = 0; t < size(); ++t) {
    out += fmt::format("{:<{}}", class_names_[t], width);
    for (std::size_t p = 0; p < size(); ++p) out += fmt::format(" {:>{}}", fmt::format("{}", count(t, p)), width);
    out += fmt::format("  | {:.4f}\n", norm[t][t]);
  }
  out += fmt::format("accuracy {}/{} = {:.4f}\n", trace(), total(), accuracy());
  return out;
}

GrayImage render_confusion_grid(const ConfusionMatrix& matrix, std::size_t cell) {
  if (cell == 0) throw std::invalid_argument("render_confusion_grid: cell size must be positive");
  const std::size_t n = matrix.size();
  GrayImage out(n * cell, n * cell);
  const auto norm = matrix.normalized_rows();
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t p = 0; p < n; ++p) {
      const auto v = static_cast<std::uint8_t>(std::lround(255.0 * norm[t][p]));
      for (std::size_t y = 0; y < cell; ++y) {
        for (std::size_t x = 0; x < cell; ++x) out.at(p * cell + x, t * cell + y) = v;
      }
    }
  }
  return out;
}

Evaluation evaluate(const ModelCheckpoint& checkpoint, const Dataset& dataset, Split split) {
  checkpoint.require_classes(dataset.class_names);
  const PreparedSplit prepared =
      prepare_split(dataset, split, checkpoint.region, checkpoint.padding, checkpoint.region_margin);
  Model model = checkpoint.instantiate();
  Evaluation out;
  out.matrix = ConfusionMatrix(dataset.class_names);
  if (!prepared.images.empty()) {
    out.predictions = argmax_rows(model.predict(eval_batch(prepared.images, checkpoint.normalization)));
  }
  for (std::size_t i = 0; i < out.predictions.size(); ++i) out.matrix.add(prepared.labels[i], out.predictions[i]);
  out.accuracy = out.matrix.accuracy();
  return out;
}

nlohmann::json RegionReport::to_json() const {
  nlohmann::json regions = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json r = {{"region", std::string(region_name(row.region))}, {"present", row.result.has_value()}};
    if (row.result) {
      r["accuracy"] = row.result->accuracy;
      r["confusion"] = row.result->matrix.to_json();
    }
    regions.push_back(r);
  }
  return {{"dataset", dataset}, {"split", std::string(split_name(split))}, {"hidden_classes", hidden_classes},
          {"regions", regions}};
}

std::string RegionReport::to_text() const {
  std::string out = fmt::format("dataset {} split {}\n", dataset, split_name(split));
  if (!hidden_classes.empty()) out += fmt::format("hidden classes: {}\n", fmt::join(hidden_classes, ", "));
  out += fmt::format("{:<12} {:>10}\n", "region", "accuracy");
  for (const auto& row : rows) {
    out += fmt::format("{:<12} {:>10}\n", region_name(row.region),
                       row.result ? fmt::format("{:.2f}%", 100.0 * row.result->accuracy) : std::string("absent"));
  }
  for (const auto& row : rows) {
    if (!row.result) continue;
    out += fmt::format("\n[{}]\n{}", region_name(row.region), row.result->matrix.to_text());
  }
  return out;
}

RegionReport compare_regions(const std::map<Region, ModelCheckpoint>& checkpoints, const Dataset& dataset, Split split,
                             const std::vector<std::string>& hidden) {
  for (const auto& [region, ckpt] : checkpoints) {
    if (ckpt.region != region) {
      throw std::invalid_argument(fmt::format("checkpoint for {} was trained on {}", region_name(region),
                                              region_name(ckpt.region)));
    }
    ckpt.require_classes(dataset.class_names);
  }
  RegionReport report;
  report.dataset = dataset.name;
  report.split = split;
  report.hidden_classes = hidden;
  for (Region region : kStandardRegions) {
    RegionRow row{region, std::nullopt};
    if (const auto it = checkpoints.find(region); it != checkpoints.end()) {
      Evaluation e = evaluate(it->second, dataset, split);
      if (!hidden.empty()) {
        e.matrix = e.matrix.masked(hidden);
        e.accuracy = e.matrix.accuracy();
      }
      row.result = std::move(e);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

FeatureTable export_features(const ModelCheckpoint& checkpoint, const Dataset& dataset, Split split) {
  if (checkpoint.kind() != ModelKind::visualizer) {
    throw WrongModelKind("feature export needs a visualizer checkpoint, got " + to_string(checkpoint.kind()));
  }
  checkpoint.require_classes(dataset.class_names);
  Model model = checkpoint.instantiate();
  const auto faces = dataset.split(split);
  const PreparedSplit prepared =
      prepare_split(dataset, split, checkpoint.region, checkpoint.padding, checkpoint.region_margin);
  FeatureTable table;
  table.class_names = dataset.class_names;
  table.dimensions = std::get<VisualizerConfig>(checkpoint.architecture).feature_channels();
  if (faces.empty()) return table;
  const Tensor<float> features = model.bottleneck_features(eval_batch(prepared.images, checkpoint.normalization));
  const std::size_t k = features.shape().per_sample();
  for (std::size_t i = 0; i < faces.size(); ++i) {
    const auto row = features.data().subspan(i * k, k);
    table.rows.push_back({faces[i]->source_id, faces[i]->label, std::vector<float>(row.begin(), row.end())});
  }
  return table;
}

void write_features_csv(std::ostream& out, const FeatureTable& table) {
  out << fmt::format("# classes: {}\n", fmt::join(table.class_names, ","));
  out << "source_id,label";
  for (std::size_t k = 0; k < table.dimensions; ++k) out << ",f" << k;
  out << '\n';
  for (const auto& row : table.rows) {
    out << row.source_id << ',' << row.label;
    for (float v : row.values) out << ',' << fmt::format("{}", v);
    out << '\n';
  }
}

}  // namespace frxa
