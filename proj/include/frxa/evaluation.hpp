#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "frxa/checkpoint.hpp"
#include "frxa/dataset.hpp"
#include "frxa/image.hpp"

namespace frxa {

/// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::vector<std::string> class_names);

  void add(int truth, int predicted);

  [[nodiscard]] const std::vector<std::string>& class_names() const { return class_names_; }
  [[nodiscard]] std::size_t size() const { return class_names_.size(); }
  [[nodiscard]] std::size_t count(std::size_t truth, std::size_t predicted) const {
    return counts_[truth * size() + predicted];
  }
  [[nodiscard]] std::size_t support(std::size_t truth) const;
  [[nodiscard]] std::size_t total() const;
  [[nodiscard]] std::size_t trace() const;
  /// trace / total, 0 for an empty matrix.
  [[nodiscard]] double accuracy() const;
  /// Each row divided by its support; rows without support are all zeros.
  [[nodiscard]] std::vector<std::vector<double>> normalized_rows() const;
  /// Drops the named classes' rows and columns (e.g. contempt).
  [[nodiscard]] ConfusionMatrix masked(const std::vector<std::string>& hidden) const;
  /// Relabels classes: new index = permutation[old index].
  [[nodiscard]] ConfusionMatrix permuted(const std::vector<std::size_t>& permutation) const;

  [[nodiscard]] nlohmann::json to_json() const;
  [[nodiscard]] std::string to_text() const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::vector<std::string> class_names_;
  std::vector<std::size_t> counts_;
};

/// Grayscale grid of the row-normalized matrix, `cell` pixels per entry, brightness = rate.
GrayImage render_confusion_grid(const ConfusionMatrix& matrix, std::size_t cell = 16);

struct Evaluation {
  ConfusionMatrix matrix;
  std::vector<int> predictions;
  double accuracy = 0.0;
};

/// Eval-preprocessed pass over one split using the checkpoint's region, padding and normalization.
Evaluation evaluate(const ModelCheckpoint& checkpoint, const Dataset& dataset, Split split);

struct RegionRow {
  Region region = Region::whole_face;
  std::optional<Evaluation> result;  // empty when no checkpoint was supplied
};

struct RegionReport {
  std::string dataset;
  Split split = Split::test;
  std::vector<std::string> hidden_classes;
  std::vector<RegionRow> rows;  // the seven standard regions in fixed order

  [[nodiscard]] nlohmann::json to_json() const;
  [[nodiscard]] std::string to_text() const;
};

/// Evaluates one checkpoint per region; missing regions are reported as absent.
/// Checkpoint classes must match the dataset's; `hidden` masks classes from the matrices and accuracy.
RegionReport compare_regions(const std::map<Region, ModelCheckpoint>& checkpoints, const Dataset& dataset, Split split,
                             const std::vector<std::string>& hidden = {});

struct FeatureRow {
  std::string source_id;
  int label = 0;
  std::vector<float> values;
};

struct FeatureTable {
  std::vector<std::string> class_names;
  std::size_t dimensions = 0;
  std::vector<FeatureRow> rows;
};

/// Bottleneck (GAP) features of a visualizer checkpoint, one row per sample in dataset order.
FeatureTable export_features(const ModelCheckpoint& checkpoint, const Dataset& dataset, Split split);
/// "# classes: a,b,..." then header "source_id,label,f0,...,f{K-1}" then one row per sample.
void write_features_csv(std::ostream& out, const FeatureTable& table);

}  // namespace frxa
