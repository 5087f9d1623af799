#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "frxa/augment.hpp"
#include "frxa/face_regions.hpp"
#include "frxa/models.hpp"

namespace frxa {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Checkpoint classes do not line up with a dataset's classes.
class ClassMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kCheckpointMagic = "FRXA1";
inline constexpr int kCheckpointVersion = 1;

struct NamedTensor {
  std::string id;
  bool trainable = true;
  Tensor<float> value;

  friend bool operator==(const NamedTensor&, const NamedTensor&) = default;
};

/// Everything needed to rebuild a trained model and preprocess its inputs.
///
/// Wire format: the 5-byte magic "FRXA1", a 4-byte little-endian header length, a UTF-8 JSON
/// header (architecture, classes, normalization, tensor manifest, training summary), then the raw
/// little-endian float32 values of every tensor in manifest order.
struct ModelCheckpoint {
  ArchitectureConfig architecture;
  std::vector<std::string> class_names;
  Region region = Region::whole_face;
  bool padding = true;
  double region_margin = kDefaultRegionMargin;
  Normalization normalization;
  double best_test_accuracy = 0.0;
  nlohmann::json training = nlohmann::json::object();
  std::vector<NamedTensor> tensors;

  [[nodiscard]] ModelKind kind() const;
  [[nodiscard]] Model instantiate() const;
  /// Copies every persistent tensor of `model`; the metadata fields are left to the caller.
  static ModelCheckpoint capture(const Model& model);
  /// Throws ClassMismatch unless `classes` equals class_names.
  void require_classes(const std::vector<std::string>& classes) const;
};

nlohmann::json architecture_to_json(const ArchitectureConfig& config);
ArchitectureConfig architecture_from_json(const nlohmann::json& j);

std::string serialize_checkpoint(const ModelCheckpoint& checkpoint);
ModelCheckpoint deserialize_checkpoint(std::string_view bytes);
void save_checkpoint(const std::filesystem::path& path, const ModelCheckpoint& checkpoint);
ModelCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace frxa
