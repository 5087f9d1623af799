#include "frxa/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "frxa/cam.hpp"
#include "frxa/checkpoint.hpp"
#include "frxa/dataset.hpp"
#include "frxa/evaluation.hpp"
#include "frxa/face_regions.hpp"
#include "frxa/tape.hpp"
#include "frxa/training.hpp"

namespace frxa::cli {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr const char* kExitCodes =
    "Exit codes: 0 success, 1 I/O failure, 2 usage or malformed/missing input,\n"
    "3 checkpoint or class mismatch, 4 numeric divergence.\n"
    "FRXA_OUT sets the default output root (default ./frxa_out).";

fs::path output_root() {
  const char* env = std::getenv("FRXA_OUT");
  return env != nullptr && *env != '\0' ? fs::path(env) : fs::path("frxa_out");
}

fs::path resolve_out(const std::string& given, const std::string& fallback) {
  return given.empty() ? output_root() / fallback : fs::path(given);
}

void require_input(const std::string& path, const char* what) {
  if (path.empty()) throw UsageError(fmt::format("missing {}", what));
  if (!fs::exists(path)) throw UsageError(fmt::format("{} not found: {}", what, path));
}

void claim_output(const fs::path& path, bool force) {
  if (fs::exists(path) && !force) throw UsageError(fmt::format("{} exists; pass --force to overwrite", path.string()));
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoFailure(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
}

void write_bytes(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoFailure("short write to " + path.string());
}

template <typename Image>
void write_image(const fs::path& path, const Image& image, bool png) {
  if (!png) {
    if constexpr (std::is_same_v<Image, RgbImage>) {
      write_bytes(path, encode_ppm(image));
    } else {
      write_bytes(path, encode_pgm(image));
    }
    return;
  }
  try {
    write_png(path, image);
  } catch (const ImageIoError& e) {
    throw IoFailure(e.what());
  }
}

std::vector<std::vector<std::size_t>> parse_plan(const std::string& text) {
  std::vector<std::vector<std::size_t>> plan;
  std::stringstream stages(text);
  std::string stage;
  while (std::getline(stages, stage, '/')) {
    std::vector<std::size_t> widths;
    std::stringstream items(stage);
    std::string item;
    while (std::getline(items, item, ',')) {
      std::size_t used = 0;
      unsigned long v = 0;
      try {
        v = std::stoul(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != item.size() || v == 0) throw UsageError(fmt::format("bad conv plan '{}'", text));
      widths.push_back(v);
    }
    plan.push_back(widths);
  }
  if (plan.empty()) throw UsageError(fmt::format("bad conv plan '{}'", text));
  return plan;
}

std::vector<Region> parse_regions(const std::string& text) {
  if (text == "all") return {kStandardRegions.begin(), kStandardRegions.end()};
  std::vector<Region> out;
  std::stringstream items(text);
  std::string item;
  while (std::getline(items, item, ',')) out.push_back(region_from_name(item));
  return out;
}

Dataset load_store(const std::string& dir) {
  require_input(dir, "dataset store");
  return read_store(dir).dataset;
}

ModelCheckpoint load_model(const std::string& path) {
  require_input(path, "checkpoint");
  return load_checkpoint(path);
}

// ---------------------------------------------------------------- synth

struct SynthOptions {
  std::string out;
  std::size_t classes = 3;
  std::size_t per_class = 100;
  std::string signal_region = "mouth";
  std::uint64_t seed = 0;
  std::size_t image_size = 64;
  std::string layout = "centered";
  double noise = 10.0;
  bool force = false;
};

int cmd_synth(const SynthOptions& o, std::ostream& out) {
  SyntheticConfig config;
  config.classes = o.classes;
  config.per_class = o.per_class;
  config.signal_region = region_from_name(o.signal_region);
  config.seed = o.seed;
  config.image_size = o.image_size;
  config.layout = o.layout == "long_axis_ends" ? PatternLayout::long_axis_ends : PatternLayout::centered;
  config.pixel_noise = o.noise;
  const fs::path dir = resolve_out(o.out, "synth");
  claim_output(dir / "labels.tsv", o.force);
  const Dataset ds = generate_synthetic(config);
  make_dir(dir);
  write_labeled_folder(dir, ds);
  const DatasetManifest m = summarize(ds);
  out << nlohmann::json{{"command", "synth"}, {"out", dir.string()}, {"classes", ds.class_names},
                        {"train", m.train_total()}, {"test", m.test_total()}}
             .dump()
      << '\n';
  return kOk;
}

// ---------------------------------------------------------------- prepare

struct PrepareOptions {
  std::string kind;
  std::string out;
  std::string pixels;
  std::string votes;
  std::string images;
  std::string labels;
  std::string name = "folder";
  double vote_threshold = 0.5;
  double confidence = 60.0;
  std::uint64_t split_seed = 0;
  bool force = false;
};

int cmd_prepare(const PrepareOptions& o, std::ostream& out) {
  const fs::path dir = resolve_out(o.out, "store");
  claim_output(dir / "manifest.json", o.force);
  IngestResult result;
  if (o.kind == "ferplus") {
    require_input(o.pixels, "pixel csv");
    require_input(o.votes, "vote csv");
    result = ingest_ferplus(o.pixels, o.votes, o.vote_threshold);
  } else if (o.kind == "rafdb") {
    require_input(o.images, "image directory");
    require_input(o.labels, "label list");
    result = ingest_rafdb(o.images, o.labels);
  } else if (o.kind == "expw") {
    require_input(o.images, "image directory");
    require_input(o.labels, "label file");
    result = ingest_expw(o.images, o.labels, o.split_seed, o.confidence);
  } else {
    require_input(o.images, "image directory");
    const std::string labels = o.labels.empty() ? (fs::path(o.images) / "labels.tsv").string() : o.labels;
    require_input(labels, "label table");
    result = ingest_folder(o.images, labels, o.name);
  }
  make_dir(dir);
  write_store(dir, result.dataset, result.manifest);
  nlohmann::json summary{{"command", "prepare"},
                         {"out", dir.string()},
                         {"dataset", result.manifest.name},
                         {"classes", result.manifest.class_names},
                         {"train", result.manifest.train_total()},
                         {"test", result.manifest.test_total()}};
  if (result.manifest.reference) {
    summary["reference_match"] = result.manifest.reference->matches;
    summary["discrepancies"] = result.manifest.reference->discrepancies;
  }
  out << summary.dump() << '\n';
  return kOk;
}

// ---------------------------------------------------------------- regions

struct RegionsOptions {
  std::string image;
  std::string landmarks;
  std::string regions = "all";
  std::string out;
  std::string format = "png";
  double margin = kDefaultRegionMargin;
  bool no_padding = false;
  bool force = false;
};

int cmd_regions(const RegionsOptions& o, std::ostream& out) {
  require_input(o.image, "image");
  const std::string lmk_path =
      o.landmarks.empty() ? fs::path(o.image).replace_extension(".lmk").string() : o.landmarks;
  require_input(lmk_path, "landmark file");
  const GrayImage image = read_image(o.image);
  const LandmarkSet68 lm = read_landmarks(lmk_path);
  const fs::path dir = resolve_out(o.out, "regions");
  const bool png = o.format == "png";
  const std::string stem = fs::path(o.image).stem().string();
  const auto regions = parse_regions(o.regions);
  for (Region r : regions) claim_output(dir / fmt::format("{}.{}.{}", stem, region_name(r), png ? "png" : "pgm"), o.force);
  make_dir(dir);
  nlohmann::json rows = nlohmann::json::array();
  for (Region r : regions) {
    const RegionCrop c = extract_region(image, lm, r, o.margin);
    const GrayImage pixels = o.no_padding ? c.pixels : pad_to_square(c.pixels);
    const fs::path file = dir / fmt::format("{}.{}.{}", stem, region_name(r), png ? "png" : "pgm");
    write_image(file, pixels, png);
    rows.push_back({{"region", std::string(region_name(r))},
                    {"box", {c.source_box.left, c.source_box.top, c.source_box.right, c.source_box.bottom}},
                    {"width", pixels.width},
                    {"height", pixels.height},
                    {"file", file.string()}});
  }
  out << nlohmann::json{{"command", "regions"}, {"regions", rows}}.dump() << '\n';
  return kOk;
}

// ---------------------------------------------------------------- train

struct TrainOptions {
  std::string store;
  std::string out;
  std::string region = "whole_face";
  std::string model = "classifier";
  std::string plan;
  std::size_t growth_rate = 12;
  std::size_t layers_per_block = 16;
  std::size_t blocks = 3;
  std::size_t initial_channels = 16;
  double compression = 0.5;
  TrainConfig config;
  bool no_padding = false;
  bool no_augmentation = false;
  bool quiet = false;
  bool force = false;
};

int cmd_train(TrainOptions o, std::ostream& out, std::ostream& err) {
  const Dataset ds = load_store(o.store);
  const Region region = region_from_name(o.region);
  ArchitectureConfig arch;
  if (model_kind_from_string(o.model) == ModelKind::classifier) {
    ClassifierConfig c;
    if (!o.plan.empty()) c.conv_plan = parse_plan(o.plan);
    c.num_classes = ds.class_names.size();
    arch = c;
  } else {
    VisualizerConfig v;
    v.growth_rate = o.growth_rate;
    v.layers_per_block = o.layers_per_block;
    v.blocks = o.blocks;
    v.initial_channels = o.initial_channels;
    v.compression = o.compression;
    v.num_classes = ds.class_names.size();
    arch = v;
  }
  o.config.padding = !o.no_padding;
  o.config.augmentation = !o.no_augmentation;
  o.config.validate();

  const fs::path dir = resolve_out(o.out, fmt::format("train-{}", o.region));
  for (const char* f : {"model.frxa", "train.log", "summary.json"}) claim_output(dir / f, o.force);
  make_dir(dir);
  std::string log;
  const TrainResult result = train(arch, ds, region, o.config, [&](const EpochRecord& r) {
    log += r.log_line() + '\n';
    if (!o.quiet) err << r.log_line() << '\n';
  });
  write_bytes(dir / "model.frxa", serialize_checkpoint(result.checkpoint));
  write_bytes(dir / "train.log", log);
  nlohmann::json summary{{"command", "train"},
                         {"checkpoint", (dir / "model.frxa").string()},
                         {"model", o.model},
                         {"region", o.region},
                         {"padding", o.config.padding},
                         {"best_run", result.best_run},
                         {"best_test_accuracy", result.checkpoint.best_test_accuracy},
                         {"train_accuracy", result.train_accuracy},
                         {"epochs", result.log.size()}};
  write_bytes(dir / "summary.json", summary.dump(2) + '\n');
  out << summary.dump() << '\n';
  return kOk;
}

// ---------------------------------------------------------------- eval

struct EvalOptions {
  std::vector<std::string> checkpoints;
  std::string store;
  std::string split = "test";
  std::vector<std::string> hide;
  std::string out;
  std::string format = "png";
  bool force = false;
};

int cmd_eval(const EvalOptions& o, std::ostream& out) {
  const Dataset ds = load_store(o.store);
  std::map<Region, ModelCheckpoint> by_region;
  for (const auto& path : o.checkpoints) {
    ModelCheckpoint ckpt = load_model(path);
    const Region r = ckpt.region;
    if (!by_region.emplace(r, std::move(ckpt)).second) {
      throw UsageError(fmt::format("two checkpoints for region {}", region_name(r)));
    }
  }
  for (const auto& h : o.hide) {
    if (std::find(ds.class_names.begin(), ds.class_names.end(), h) == ds.class_names.end()) {
      throw UsageError(fmt::format("--hide {}: no such class", h));
    }
  }
  const bool png = o.format == "png";
  const fs::path dir = resolve_out(o.out, "eval");
  claim_output(dir / "report.json", o.force);
  claim_output(dir / "report.txt", o.force);
  const RegionReport report = compare_regions(by_region, ds, split_from_name(o.split), o.hide);
  make_dir(dir);
  write_bytes(dir / "report.json", report.to_json().dump(2) + '\n');
  write_bytes(dir / "report.txt", report.to_text());
  nlohmann::json accuracies = nlohmann::json::object();
  for (const auto& row : report.rows) {
    if (!row.result) continue;
    accuracies[std::string(region_name(row.region))] = row.result->accuracy;
    write_image(dir / fmt::format("confusion.{}.{}", region_name(row.region), png ? "png" : "pgm"),
                render_confusion_grid(row.result->matrix), png);
  }
  out << nlohmann::json{{"command", "eval"}, {"report", (dir / "report.json").string()}, {"accuracy", accuracies}}.dump()
      << '\n';
  return kOk;
}

// ---------------------------------------------------------------- cam

struct CamOptions {
  std::string checkpoint;
  std::vector<std::string> images;
  std::vector<std::string> landmarks;
  std::string classes = "all";
  std::string out;
  std::string format = "png";
  bool force = false;
};

std::vector<std::size_t> parse_classes(const std::string& text, const std::vector<std::string>& names) {
  std::vector<std::size_t> out;
  if (text == "all") {
    for (std::size_t i = 0; i < names.size(); ++i) out.push_back(i);
    return out;
  }
  std::stringstream items(text);
  std::string item;
  while (std::getline(items, item, ',')) {
    const auto it = std::find(names.begin(), names.end(), item);
    if (it == names.end()) throw UsageError(fmt::format("unknown class '{}'", item));
    out.push_back(static_cast<std::size_t>(it - names.begin()));
  }
  return out;
}

int cmd_cam(const CamOptions& o, std::ostream& out) {
  const ModelCheckpoint ckpt = load_model(o.checkpoint);
  if (ckpt.kind() != ModelKind::visualizer) {
    throw WrongModelKind("heatmaps need a visualizer checkpoint, got " + to_string(ckpt.kind()));
  }
  if (!o.landmarks.empty() && o.landmarks.size() != o.images.size()) {
    throw UsageError("--landmarks must be given once per --image or not at all");
  }
  for (const auto& img : o.images) require_input(img, "image");
  const auto classes = parse_classes(o.classes, ckpt.class_names);
  const bool png = o.format == "png";
  const auto format = png ? HeatmapFormat::png : HeatmapFormat::ppm;
  const fs::path dir = resolve_out(o.out, "cam");
  for (const auto& img : o.images) {
    for (std::size_t c : classes) {
      claim_output(dir / heatmap_file_name(fs::path(img).stem().string(), ckpt.class_names[c], format), o.force);
    }
  }
  make_dir(dir);
  Model model = ckpt.instantiate();
  for (std::size_t i = 0; i < o.images.size(); ++i) {
    const GrayImage image = read_image(o.images[i]);
    std::optional<LandmarkSet68> lm;
    const fs::path sidecar = fs::path(o.images[i]).replace_extension(".lmk");
    if (!o.landmarks.empty()) {
      require_input(o.landmarks[i], "landmark file");
      lm = read_landmarks(o.landmarks[i]);
    } else if (fs::is_regular_file(sidecar)) {
      lm = read_landmarks(sidecar);
    }
    const GrayImage view = eval_view(region_input(image, lm, ckpt.region, ckpt.padding, ckpt.region_margin));
    Tensor<float> input(Shape{1, 1, kInputSide, kInputSide});
    normalize_into(view, ckpt.normalization, input.data());
    Tape<float> tape;
    const auto fwd = model.forward(tape.input(std::move(input)), Mode::inference);
    const Tensor<float> probs = ops::softmax(fwd.logits.value());
    const std::string stem = fs::path(o.images[i]).stem().string();
    nlohmann::json files = nlohmann::json::array();
    for (std::size_t c : classes) {
      const CamMap cam = compute_cam(fwd.feature_maps.value(), model.fc_weights().value, c);
      const fs::path file = dir / heatmap_file_name(stem, ckpt.class_names[c], format);
      write_image(file, render_cam(cam, view), png);
      files.push_back(file.string());
    }
    const auto predicted = static_cast<std::size_t>(argmax_rows(probs)[0]);
    out << nlohmann::json{{"command", "cam"},
                          {"image", o.images[i]},
                          {"predicted", ckpt.class_names[predicted]},
                          {"probabilities", std::vector<float>(probs.data().begin(), probs.data().end())},
                          {"files", files}}
               .dump()
        << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------- export-features

struct ExportOptions {
  std::string checkpoint;
  std::string store;
  std::string split = "test";
  std::string out;
  bool force = false;
};

int cmd_export(const ExportOptions& o, std::ostream& out) {
  const ModelCheckpoint ckpt = load_model(o.checkpoint);
  const Dataset ds = load_store(o.store);
  const fs::path file = o.out.empty() ? output_root() / "features.csv" : fs::path(o.out);
  claim_output(file, o.force);
  const FeatureTable table = export_features(ckpt, ds, split_from_name(o.split));
  if (file.has_parent_path()) make_dir(file.parent_path());
  std::ostringstream csv;
  write_features_csv(csv, table);
  write_bytes(file, csv.str());
  out << nlohmann::json{{"command", "export-features"},
                        {"out", file.string()},
                        {"rows", table.rows.size()},
                        {"dimensions", table.dimensions}}
             .dump()
      << '\n';
  return kOk;
}

template <typename... E>
bool is_any(const std::exception& e) {
  return ((dynamic_cast<const E*>(&e) != nullptr) || ...);
}

int exit_code_for(const std::exception& e) {
  if (is_any<DivergenceError>(e)) return kDivergence;
  if (is_any<CheckpointError, ClassMismatch, WrongModelKind>(e)) return kCheckpointMismatch;
  if (is_any<IoFailure, fs::filesystem_error>(e)) return kIoFailure;
  if (is_any<UsageError, DataFormatError, LandmarkFormatError, ImageIoError, DegenerateRegion, EmptyDatasetError,
             std::invalid_argument>(e)) {
    return kUsage;
  }
  return kIoFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Facial expression toolkit: region crops, training, evaluation and class activation heatmaps", "frxa"};
  app.footer(kExitCodes);
  app.require_subcommand(1);
  const std::vector<std::string> region_names{"mouth", "nose", "eyes", "nose_mouth", "nose_eyes", "mouth_eyes",
                                              "whole_face", "eyes_symmetric"};

  SynthOptions synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic labeled face folder with landmark sidecars");
  s->add_option("--out", synth.out, "Output folder (default $FRXA_OUT/synth)");
  s->add_option("--classes", synth.classes, "Number of classes")->capture_default_str()->check(CLI::Range(2, 64));
  s->add_option("--per-class", synth.per_class, "Samples per class")->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--signal-region", synth.signal_region, "Region carrying the class pattern")
      ->capture_default_str()
      ->check(CLI::IsMember(region_names));
  s->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
  s->add_option("--image-size", synth.image_size, "Image side in pixels")->capture_default_str()->check(CLI::Range(16, 1024));
  s->add_option("--layout", synth.layout, "Pattern layout")
      ->capture_default_str()
      ->check(CLI::IsMember({"centered", "long_axis_ends"}));
  s->add_option("--noise", synth.noise, "Pixel noise standard deviation")->capture_default_str()->check(CLI::NonNegativeNumber);
  s->add_flag("--force", synth.force, "Overwrite existing outputs");

  PrepareOptions prep;
  auto* p = app.add_subcommand("prepare", "Ingest, filter and split a dataset into a prepared store");
  p->add_option("--kind", prep.kind, "Dataset kind")->required()->check(CLI::IsMember({"ferplus", "rafdb", "expw", "folder"}));
  p->add_option("--out", prep.out, "Store directory (default $FRXA_OUT/store)");
  p->add_option("--pixels", prep.pixels, "FER+: emotion,pixels,Usage csv");
  p->add_option("--votes", prep.votes, "FER+: vote csv");
  p->add_option("--images", prep.images, "RAF-DB/ExpW/folder: image directory");
  p->add_option("--labels", prep.labels, "RAF-DB label list, ExpW label file or folder labels.tsv");
  p->add_option("--name", prep.name, "Folder: dataset name")->capture_default_str();
  p->add_option("--vote-threshold", prep.vote_threshold, "FER+: minimum share of the top emotion")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  p->add_option("--confidence", prep.confidence, "ExpW: keep faces with confidence strictly above this")->capture_default_str();
  p->add_option("--split-seed", prep.split_seed, "ExpW: stratified split seed")->capture_default_str();
  p->add_flag("--force", prep.force, "Overwrite existing outputs");

  RegionsOptions reg;
  auto* r = app.add_subcommand("regions", "Write the region crops of one image");
  r->add_option("--image", reg.image, "Input image (PGM or PNG)")->required();
  r->add_option("--landmarks", reg.landmarks, "68-point sidecar (default: <image>.lmk)");
  r->add_option("--region", reg.regions, "'all' or a comma-separated region list")->capture_default_str();
  r->add_option("--out", reg.out, "Output directory (default $FRXA_OUT/regions)");
  r->add_option("--format", reg.format, "Image format")->capture_default_str()->check(CLI::IsMember({"png", "pgm"}));
  r->add_option("--margin", reg.margin, "Box margin as a fraction of the longer side")->capture_default_str()->check(CLI::NonNegativeNumber);
  r->add_flag("--no-padding", reg.no_padding, "Keep the raw crop instead of padding to a square");
  r->add_flag("--force", reg.force, "Overwrite existing outputs");

  TrainOptions tr;
  auto* t = app.add_subcommand("train", "Train on one face region and write the best checkpoint");
  t->add_option("--store", tr.store, "Prepared dataset store")->required();
  t->add_option("--out", tr.out, "Output directory (default $FRXA_OUT/train-<region>)");
  t->add_option("--region", tr.region, "Face region")->capture_default_str()->check(CLI::IsMember(region_names));
  t->add_option("--model", tr.model, "Architecture")->capture_default_str()->check(CLI::IsMember({"classifier", "visualizer"}));
  t->add_option("--plan", tr.plan, "Classifier conv widths, stages separated by '/', e.g. 16,16/32,32");
  t->add_option("--growth-rate", tr.growth_rate, "Visualizer growth rate")->capture_default_str();
  t->add_option("--layers-per-block", tr.layers_per_block, "Visualizer layers per dense block")->capture_default_str();
  t->add_option("--blocks", tr.blocks, "Visualizer dense blocks")->capture_default_str();
  t->add_option("--initial-channels", tr.initial_channels, "Visualizer stem channels")->capture_default_str();
  t->add_option("--compression", tr.compression, "Visualizer transition compression")->capture_default_str();
  t->add_option("--lr0", tr.config.lr0, "Initial learning rate")->capture_default_str();
  t->add_option("--epochs", tr.config.max_epochs, "Maximum epochs per run")->capture_default_str();
  t->add_option("--batch-size", tr.config.batch_size, "Mini-batch size")->capture_default_str();
  t->add_option("--runs", tr.config.runs, "Independent runs; the best by test accuracy is kept")->capture_default_str();
  t->add_option("--lr-decay", tr.config.lr_decay_factor, "Learning-rate decay factor")->capture_default_str();
  t->add_option("--lr-patience", tr.config.lr_patience, "Evaluations without improvement before decay")->capture_default_str();
  t->add_option("--stop-patience", tr.config.stop_patience, "Epochs without improvement before stopping")->capture_default_str();
  t->add_option("--min-lr", tr.config.min_lr, "Learning-rate floor")->capture_default_str();
  t->add_option("--seed", tr.config.seed, "Base seed; run i uses seed + i")->capture_default_str();
  t->add_option("--margin", tr.config.region_margin, "Region box margin")->capture_default_str();
  t->add_flag("--no-padding", tr.no_padding, "Square-crop region inputs instead of padding them");
  t->add_flag("--no-augmentation", tr.no_augmentation, "Use the evaluation view for training batches");
  t->add_flag("--quiet", tr.quiet, "Do not echo epoch lines to stderr");
  t->add_flag("--force", tr.force, "Overwrite existing outputs");

  EvalOptions ev;
  auto* e = app.add_subcommand("eval", "Accuracy and confusion matrices, one row per face region");
  e->add_option("--checkpoint", ev.checkpoints, "Checkpoint (repeat for several regions)")->required();
  e->add_option("--store", ev.store, "Prepared dataset store")->required();
  e->add_option("--split", ev.split, "Split to evaluate")->capture_default_str()->check(CLI::IsMember({"train", "test"}));
  e->add_option("--hide", ev.hide, "Class to mask from matrices and accuracy (repeatable)");
  e->add_option("--out", ev.out, "Output directory (default $FRXA_OUT/eval)");
  e->add_option("--format", ev.format, "Confusion grid format")->capture_default_str()->check(CLI::IsMember({"png", "pgm"}));
  e->add_flag("--force", ev.force, "Overwrite existing outputs");

  CamOptions cm;
  auto* c = app.add_subcommand("cam", "Class activation heatmaps blended onto the model input view");
  c->add_option("--checkpoint", cm.checkpoint, "Visualizer checkpoint")->required();
  c->add_option("--image", cm.images, "Input image (repeatable)")->required();
  c->add_option("--landmarks", cm.landmarks, "Landmark sidecar per image (default: <image>.lmk when present)");
  c->add_option("--classes", cm.classes, "'all' or a comma-separated class list")->capture_default_str();
  c->add_option("--out", cm.out, "Output directory (default $FRXA_OUT/cam)");
  c->add_option("--format", cm.format, "Heatmap format")->capture_default_str()->check(CLI::IsMember({"png", "ppm"}));
  c->add_flag("--force", cm.force, "Overwrite existing outputs");

  ExportOptions ex;
  auto* x = app.add_subcommand("export-features", "Write bottleneck features of a visualizer as CSV");
  x->add_option("--checkpoint", ex.checkpoint, "Visualizer checkpoint")->required();
  x->add_option("--store", ex.store, "Prepared dataset store")->required();
  x->add_option("--split", ex.split, "Split to export")->capture_default_str()->check(CLI::IsMember({"train", "test"}));
  x->add_option("--out", ex.out, "CSV path (default $FRXA_OUT/features.csv)");
  x->add_flag("--force", ex.force, "Overwrite existing outputs");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& pe) {
    const int code = app.exit(pe, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (s->parsed()) return cmd_synth(synth, out);
    if (p->parsed()) return cmd_prepare(prep, out);
    if (r->parsed()) return cmd_regions(reg, out);
    if (t->parsed()) return cmd_train(tr, out, err);
    if (e->parsed()) return cmd_eval(ev, out);
    if (c->parsed()) return cmd_cam(cm, out);
    if (x->parsed()) return cmd_export(ex, out);
  } catch (const std::exception& failure) {
    err << "error: " << failure.what() << '\n';
    return exit_code_for(failure);
  }
  return kUsage;
}

}  // namespace frxa::cli
