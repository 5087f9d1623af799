#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "frxa/face_regions.hpp"
#include "frxa/image.hpp"

namespace frxa {

/// Malformed or missing dataset input. Messages carry the offending path/line/position.
class DataFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Split { train, test };

[[nodiscard]] std::string_view split_name(Split split);
[[nodiscard]] Split split_from_name(std::string_view name);

/// The seven basic emotions, in the order used by every table and label space here.
const std::vector<std::string>& basic_emotions();
/// basic_emotions() plus contempt (FER+ label space).
const std::vector<std::string>& ferplus_emotions();

struct LabeledFace {
  GrayImage image;
  int label = 0;
  std::optional<LandmarkSet68> landmarks;
  Split split = Split::train;
  std::string source_id;
};

struct Dataset {
  std::string name;
  std::vector<std::string> class_names;
  std::vector<LabeledFace> samples;

  [[nodiscard]] std::vector<const LabeledFace*> split(Split which) const;
};

/// Published per-class train/test counts compared against what ingestion produced.
struct ReferenceCheck {
  std::vector<std::size_t> expected_train;
  std::vector<std::size_t> expected_test;
  bool matches = false;
  std::vector<std::string> discrepancies;
};

struct DatasetManifest {
  std::string name;
  std::vector<std::string> class_names;
  std::vector<std::size_t> train_counts;
  std::vector<std::size_t> test_counts;
  nlohmann::json filter = nlohmann::json::object();
  std::optional<std::uint64_t> split_seed;
  std::optional<ReferenceCheck> reference;

  [[nodiscard]] std::size_t train_total() const;
  [[nodiscard]] std::size_t test_total() const;
  [[nodiscard]] nlohmann::json to_json() const;
  static DatasetManifest from_json(const nlohmann::json& j);
};

/// Counts per class and split; labels outside the class list are rejected.
DatasetManifest summarize(const Dataset& dataset);
ReferenceCheck check_reference(const DatasetManifest& manifest, const std::vector<std::size_t>& expected_train,
                               const std::vector<std::size_t>& expected_test);

struct IngestResult {
  Dataset dataset;
  DatasetManifest manifest;
};

/// Published distributions; every ingest compares against its table.
struct ReferenceTable {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};
const ReferenceTable& ferplus_reference();
const ReferenceTable& rafdb_reference();
const ReferenceTable& expw_reference();

/// FER+ majority-vote rule: label = argmax of the eight emotion votes (lowest index on ties);
/// returns nullopt when the top share is below `threshold` of all emotion votes.
std::optional<int> ferplus_vote_label(const std::vector<int>& emotion_votes, double threshold = 0.5);

/// `pixel_csv`: emotion,pixels,Usage rows of 48x48 space-separated gray values.
/// `votes_csv`: Usage,Image name, eight emotion vote columns, optional unknown/NF columns.
IngestResult ingest_ferplus(const std::filesystem::path& pixel_csv, const std::filesystem::path& votes_csv,
                            double vote_threshold = 0.5);

/// `label_list`: "<name> <label 1..7>" per line, names prefixed train_/test_.
/// Images are looked up in `image_dir` as PGM/PNG by stem (optionally with an "_aligned" suffix).
IngestResult ingest_rafdb(const std::filesystem::path& image_dir, const std::filesystem::path& label_list);

/// `label_file`: "<image> <face_id> <top> <left> <right> <bottom> <confidence> <label 0..6>" per line.
IngestResult ingest_expw(const std::filesystem::path& image_dir, const std::filesystem::path& label_file,
                         std::uint64_t split_seed, double confidence_threshold = 60.0);

/// Per-class test counts for a 4:1 split: floor(count / 5).
std::size_t expw_test_count(std::size_t class_count);

/// Generic labeled folder: `labels_tsv` rows "file<TAB>class_name<TAB>split", header line first;
/// a ".lmk" sidecar next to an image is picked up when present.
IngestResult ingest_folder(const std::filesystem::path& image_dir, const std::filesystem::path& labels_tsv,
                           const std::string& name);

enum class PatternLayout { centered, long_axis_ends };

struct SyntheticConfig {
  std::size_t classes = 3;
  std::size_t per_class = 100;
  Region signal_region = Region::mouth;
  std::uint64_t seed = 0;
  std::size_t image_size = 64;
  PatternLayout layout = PatternLayout::centered;
  double pixel_noise = 10.0;
};

/// Schematic faces with a class pattern painted only inside the signal region's landmark box.
/// The last floor(per_class / 5) samples of each class form the test split.
Dataset generate_synthetic(const SyntheticConfig& config);
/// The noiseless landmark template scaled to `image_size`.
LandmarkSet68 landmark_template(std::size_t image_size);
std::vector<std::string> synthetic_class_names(std::size_t classes);

/// Writes a generator/ingestion result as a labeled folder readable by ingest_folder.
void write_labeled_folder(const std::filesystem::path& dir, const Dataset& dataset);

/// Prepared store: manifest.json, index.tsv, images/<id>.pgm (+ .lmk).
void write_store(const std::filesystem::path& dir, const Dataset& dataset, const DatasetManifest& manifest);
IngestResult read_store(const std::filesystem::path& dir);

}  // namespace frxa
