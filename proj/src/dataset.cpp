#include "frxa/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include <fmt/format.h>

namespace frxa {

namespace fs = std::filesystem;

std::string_view split_name(Split split) { return split == Split::train ? "train" : "test"; }

Split split_from_name(std::string_view name) {
  if (name == "train") return Split::train;
  if (name == "test") return Split::test;
  throw DataFormatError(fmt::format("unknown split '{}' (expected train or test)", name));
}

const std::vector<std::string>& basic_emotions() {
  static const std::vector<std::string> names{"neutral", "happiness", "surprise", "sadness",
                                              "anger",   "disgust",   "fear"};
  return names;
}

const std::vector<std::string>& ferplus_emotions() {
  static const std::vector<std::string> names{"neutral", "happiness", "surprise", "sadness",
                                              "anger",   "disgust",   "fear",     "contempt"};
  return names;
}

std::vector<const LabeledFace*> Dataset::split(Split which) const {
  std::vector<const LabeledFace*> out;
  for (const auto& s : samples) {
    if (s.split == which) out.push_back(&s);
  }
  return out;
}

std::size_t DatasetManifest::train_total() const {
  return std::accumulate(train_counts.begin(), train_counts.end(), std::size_t{0});
}

std::size_t DatasetManifest::test_total() const {
  return std::accumulate(test_counts.begin(), test_counts.end(), std::size_t{0});
}

nlohmann::json DatasetManifest::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["classes"] = class_names;
  j["counts"] = {{"train", train_counts}, {"test", test_counts}};
  j["totals"] = {{"train", train_total()}, {"test", test_total()}};
  j["filter"] = filter;
  j["split_seed"] = split_seed ? nlohmann::json(*split_seed) : nlohmann::json(nullptr);
  if (reference) {
    j["reference_check"] = {{"expected_train", reference->expected_train},
                            {"expected_test", reference->expected_test},
                            {"expected_totals",
                             {{"train", std::accumulate(reference->expected_train.begin(),
                                                        reference->expected_train.end(), std::size_t{0})},
                              {"test", std::accumulate(reference->expected_test.begin(),
                                                       reference->expected_test.end(), std::size_t{0})}}},
                            {"matches", reference->matches},
                            {"discrepancies", reference->discrepancies}};
  }
  return j;
}

DatasetManifest DatasetManifest::from_json(const nlohmann::json& j) {
  DatasetManifest m;
  m.name = j.at("name").get<std::string>();
  m.class_names = j.at("classes").get<std::vector<std::string>>();
  m.train_counts = j.at("counts").at("train").get<std::vector<std::size_t>>();
  m.test_counts = j.at("counts").at("test").get<std::vector<std::size_t>>();
  m.filter = j.value("filter", nlohmann::json::object());
  if (j.contains("split_seed") && !j["split_seed"].is_null()) m.split_seed = j["split_seed"].get<std::uint64_t>();
  if (j.contains("reference_check")) {
    const auto& r = j["reference_check"];
    ReferenceCheck check;
    check.expected_train = r.at("expected_train").get<std::vector<std::size_t>>();
    check.expected_test = r.at("expected_test").get<std::vector<std::size_t>>();
    check.matches = r.at("matches").get<bool>();
    check.discrepancies = r.at("discrepancies").get<std::vector<std::string>>();
    m.reference = check;
  }
  return m;
}

DatasetManifest summarize(const Dataset& dataset) {
  DatasetManifest m;
  m.name = dataset.name;
  m.class_names = dataset.class_names;
  m.train_counts.assign(dataset.class_names.size(), 0);
  m.test_counts.assign(dataset.class_names.size(), 0);
  for (const auto& s : dataset.samples) {
    if (s.label < 0 || static_cast<std::size_t>(s.label) >= dataset.class_names.size()) {
      throw DataFormatError(fmt::format("sample '{}' has label {} outside [0, {})", s.source_id, s.label,
                                        dataset.class_names.size()));
    }
    auto& counts = s.split == Split::train ? m.train_counts : m.test_counts;
    ++counts[static_cast<std::size_t>(s.label)];
  }
  return m;
}

ReferenceCheck check_reference(const DatasetManifest& manifest, const std::vector<std::size_t>& expected_train,
                               const std::vector<std::size_t>& expected_test) {
  ReferenceCheck check{expected_train, expected_test, true, {}};
  const auto sum = [](const std::vector<std::size_t>& v) { return std::accumulate(v.begin(), v.end(), std::size_t{0}); };
  if (manifest.train_total() != sum(expected_train) || manifest.test_total() != sum(expected_test)) {
    check.discrepancies.push_back(fmt::format("totals {}/{} differ from published {}/{}", manifest.train_total(),
                                              manifest.test_total(), sum(expected_train), sum(expected_test)));
  }
  for (std::size_t c = 0; c < manifest.class_names.size() && c < expected_train.size(); ++c) {
    if (manifest.train_counts[c] != expected_train[c] || manifest.test_counts[c] != expected_test[c]) {
      check.discrepancies.push_back(fmt::format("{}: {}/{} vs published {}/{}", manifest.class_names[c],
                                                manifest.train_counts[c], manifest.test_counts[c], expected_train[c],
                                                expected_test[c]));
    }
  }
  check.matches = check.discrepancies.empty();
  return check;
}

const ReferenceTable& ferplus_reference() {
  static const ReferenceTable t{{11000, 8326, 3807, 3660, 2535, 151, 636, 153}, {1219, 920, 429, 421, 287, 19, 88, 21}};
  return t;
}

const ReferenceTable& rafdb_reference() {
  static const ReferenceTable t{{2524, 4772, 1290, 1982, 705, 717, 281}, {680, 1185, 329, 478, 162, 160, 74}};
  return t;
}

const ReferenceTable& expw_reference() {
  static const ReferenceTable t{{8309, 10576, 2471, 2494, 1272, 1250, 329}, {2077, 2644, 617, 623, 318, 312, 82}};
  return t;
}

namespace {

std::vector<std::string> read_lines(const fs::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw DataFormatError(fmt::format("cannot open {} '{}'", what, path.string()));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<std::string> split_on(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    std::string field(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (field.size() >= 2 && field.front() == '"' && field.back() == '"') field = field.substr(1, field.size() - 2);
    out.push_back(std::move(field));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> split_ws(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

template <typename Num>
std::optional<Num> parse_number(std::string_view s) {
  Num value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t") == std::string::npos; }

GrayImage parse_fer_pixels(std::string_view text, std::size_t row) {
  constexpr std::size_t kSide = 48;
  GrayImage image(kSide, kSide);
  std::size_t count = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    if (pos >= text.size()) break;
    std::size_t end = pos;
    while (end < text.size() && text[end] != ' ') ++end;
    const auto value = parse_number<int>(text.substr(pos, end - pos));
    if (!value || *value < 0 || *value > 255) {
      throw DataFormatError(fmt::format("pixel row {}: value '{}' at position {} is not a gray level 0..255", row,
                                        text.substr(pos, end - pos), count));
    }
    if (count >= kSide * kSide) {
      throw DataFormatError(fmt::format("pixel row {}: more than {} values (position {})", row, kSide * kSide, count));
    }
    image.pixels[count++] = static_cast<std::uint8_t>(*value);
    pos = end;
  }
  if (count != kSide * kSide) {
    throw DataFormatError(fmt::format("pixel row {}: expected {} values, found {} (position {})", row, kSide * kSide,
                                      count, count));
  }
  return image;
}

Split fer_usage(const std::string& usage, std::size_t row) {
  if (usage == "Training" || usage == "PublicTest") return Split::train;
  if (usage == "PrivateTest") return Split::test;
  throw DataFormatError(fmt::format("row {}: unknown usage '{}'", row, usage));
}

std::string stem_of(const std::string& name) { return fs::path(name).stem().string(); }

std::optional<fs::path> find_image(const fs::path& dir, const std::string& name) {
  const std::string stem = stem_of(name);
  for (const auto& candidate : {name, stem + ".pgm", stem + ".png", stem + "_aligned.pgm", stem + "_aligned.png"}) {
    const fs::path p = dir / candidate;
    const auto ext = p.extension().string();
    if ((ext == ".pgm" || ext == ".png") && fs::is_regular_file(p)) return p;
  }
  return std::nullopt;
}

[[noreturn]] void throw_missing(const std::vector<std::string>& missing, const fs::path& dir) {
  std::string list;
  for (std::size_t i = 0; i < missing.size() && i < 20; ++i) list += (i ? ", " : "") + missing[i];
  if (missing.size() > 20) list += fmt::format(", ... ({} more)", missing.size() - 20);
  throw DataFormatError(fmt::format("{} listed image(s) absent from '{}': {}", missing.size(), dir.string(), list));
}

void attach_reference(DatasetManifest& m, const ReferenceTable& table) {
  m.reference = check_reference(m, table.train, table.test);
}

}  // namespace

std::optional<int> ferplus_vote_label(const std::vector<int>& emotion_votes, double threshold) {
  const int total = std::accumulate(emotion_votes.begin(), emotion_votes.end(), 0);
  if (total <= 0) return std::nullopt;
  const auto top = std::max_element(emotion_votes.begin(), emotion_votes.end());  // first max on ties
  if (static_cast<double>(*top) < threshold * static_cast<double>(total)) return std::nullopt;
  return static_cast<int>(top - emotion_votes.begin());
}

IngestResult ingest_ferplus(const fs::path& pixel_csv, const fs::path& votes_csv, double vote_threshold) {
  auto pixel_lines = read_lines(pixel_csv, "FER pixel file");
  auto vote_lines = read_lines(votes_csv, "FER+ vote file");
  std::erase_if(pixel_lines, blank);
  std::erase_if(vote_lines, blank);
  if (!pixel_lines.empty() && !parse_number<int>(split_on(pixel_lines.front(), ',').front())) {
    pixel_lines.erase(pixel_lines.begin());
  }
  if (!vote_lines.empty()) {
    const auto fields = split_on(vote_lines.front(), ',');
    if (fields.size() < 3 || !parse_number<int>(fields[2])) vote_lines.erase(vote_lines.begin());
  }
  if (pixel_lines.size() != vote_lines.size()) {
    throw DataFormatError(fmt::format("row-count mismatch: {} pixel rows in '{}' vs {} vote rows in '{}'",
                                      pixel_lines.size(), pixel_csv.string(), vote_lines.size(), votes_csv.string()));
  }

  IngestResult result;
  result.dataset.name = "ferplus";
  result.dataset.class_names = ferplus_emotions();
  std::size_t removed = 0;
  for (std::size_t i = 0; i < pixel_lines.size(); ++i) {
    const std::size_t row = i + 1;
    const auto pix = split_on(pixel_lines[i], ',');
    const auto votes = split_on(vote_lines[i], ',');
    if (pix.size() < 2) throw DataFormatError(fmt::format("pixel row {}: expected emotion,pixels[,Usage]", row));
    if (votes.size() < 10) throw DataFormatError(fmt::format("vote row {}: expected at least 10 columns", row));
    std::vector<int> counts(8);
    for (std::size_t c = 0; c < 8; ++c) {
      const auto v = parse_number<int>(votes[2 + c]);
      if (!v || *v < 0) throw DataFormatError(fmt::format("vote row {}: column {} is not a count", row, 3 + c));
      counts[c] = *v;
    }
    const std::string usage = !votes[0].empty() ? votes[0] : (pix.size() > 2 ? pix[2] : std::string{});
    const Split split = fer_usage(usage, row);
    GrayImage image = parse_fer_pixels(pix[1], row);
    const auto label = ferplus_vote_label(counts, vote_threshold);
    if (!label) {
      ++removed;
      continue;
    }
    LabeledFace face;
    face.image = std::move(image);
    face.label = *label;
    face.split = split;
    face.source_id = votes[1].empty() ? fmt::format("ferplus_{:05}", row) : stem_of(votes[1]);
    result.dataset.samples.push_back(std::move(face));
  }
  result.manifest = summarize(result.dataset);
  result.manifest.filter = {{"rule", "max emotion vote share >= threshold"},
                            {"vote_threshold", vote_threshold},
                            {"rows", pixel_lines.size()},
                            {"removed", removed}};
  attach_reference(result.manifest, ferplus_reference());
  return result;
}

IngestResult ingest_rafdb(const fs::path& image_dir, const fs::path& label_list) {
  // Official RAF-DB codes 1..7: surprise, fear, disgust, happiness, sadness, anger, neutral.
  static constexpr int kMap[8] = {-1, 2, 6, 5, 1, 3, 4, 0};
  const auto lines = read_lines(label_list, "RAF-DB label list");
  IngestResult result;
  result.dataset.name = "rafdb";
  result.dataset.class_names = basic_emotions();
  std::vector<std::string> missing;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    const auto fields = split_ws(lines[i]);
    const auto code = fields.size() == 2 ? parse_number<int>(fields[1]) : std::nullopt;
    if (!code || *code < 1 || *code > 7) {
      throw DataFormatError(fmt::format("{}:{}: expected '<name> <label 1..7>'", label_list.string(), i + 1));
    }
    const std::string& name = fields[0];
    Split split;
    if (name.rfind("train", 0) == 0) {
      split = Split::train;
    } else if (name.rfind("test", 0) == 0) {
      split = Split::test;
    } else {
      throw DataFormatError(fmt::format("{}:{}: name '{}' has no train/test prefix", label_list.string(), i + 1, name));
    }
    const auto path = find_image(image_dir, name);
    if (!path) {
      missing.push_back(name);
      continue;
    }
    LabeledFace face;
    face.image = read_image(*path);
    face.label = kMap[*code];
    face.split = split;
    face.source_id = stem_of(name);
    const fs::path sidecar = fs::path(*path).replace_extension(".lmk");
    if (fs::is_regular_file(sidecar)) face.landmarks = read_landmarks(sidecar);
    result.dataset.samples.push_back(std::move(face));
  }
  if (!missing.empty()) throw_missing(missing, image_dir);
  result.manifest = summarize(result.dataset);
  result.manifest.filter = {{"rule", "official single-label split"}};
  attach_reference(result.manifest, rafdb_reference());
  return result;
}

std::size_t expw_test_count(std::size_t class_count) { return class_count / 5; }

IngestResult ingest_expw(const fs::path& image_dir, const fs::path& label_file, std::uint64_t split_seed,
                         double confidence_threshold) {
  // ExpW codes 0..6: angry, disgust, fear, happy, sad, surprise, neutral.
  static constexpr int kMap[7] = {4, 5, 6, 1, 3, 2, 0};
  const auto lines = read_lines(label_file, "ExpW label file");
  IngestResult result;
  result.dataset.name = "expw";
  result.dataset.class_names = basic_emotions();
  std::map<std::string, GrayImage> cache;
  std::vector<std::string> missing;
  std::size_t rows = 0;
  std::size_t rejected = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    ++rows;
    const std::size_t line_no = i + 1;
    const auto fields = split_ws(lines[i]);
    if (fields.size() != 8) {
      throw DataFormatError(fmt::format("{}:{}: expected 8 fields, found {}", label_file.string(), line_no, fields.size()));
    }
    const auto top = parse_number<long>(fields[2]);
    const auto left = parse_number<long>(fields[3]);
    const auto right = parse_number<long>(fields[4]);
    const auto bottom = parse_number<long>(fields[5]);
    const auto confidence = parse_number<double>(fields[6]);
    const auto code = parse_number<int>(fields[7]);
    if (!top || !left || !right || !bottom || !confidence || !code || *code < 0 || *code > 6 ||
        !std::isfinite(*confidence)) {
      throw DataFormatError(fmt::format("{}:{}: malformed row '{}'", label_file.string(), line_no, lines[i]));
    }
    if (!(*confidence > confidence_threshold)) {
      ++rejected;
      continue;
    }
    auto it = cache.find(fields[0]);
    if (it == cache.end()) {
      const auto path = find_image(image_dir, fields[0]);
      if (!path) {
        missing.push_back(fields[0]);
        cache.emplace(fields[0], GrayImage{});
        continue;
      }
      it = cache.emplace(fields[0], read_image(*path)).first;
    }
    const GrayImage& full = it->second;
    if (full.empty()) continue;  // already reported missing
    const auto clampx = [&](long v) { return static_cast<std::size_t>(std::clamp<long>(v, 0, static_cast<long>(full.width))); };
    const auto clampy = [&](long v) { return static_cast<std::size_t>(std::clamp<long>(v, 0, static_cast<long>(full.height))); };
    const std::size_t x0 = clampx(*left), x1 = clampx(*right), y0 = clampy(*top), y1 = clampy(*bottom);
    if (x1 <= x0 || y1 <= y0) {
      throw DataFormatError(fmt::format("{}:{}: face box is empty after clipping to the image", label_file.string(), line_no));
    }
    LabeledFace face;
    face.image = crop(full, x0, y0, x1 - x0, y1 - y0);
    face.label = kMap[*code];
    face.source_id = fmt::format("{}_{}", stem_of(fields[0]), fields[1]);
    result.dataset.samples.push_back(std::move(face));
  }
  if (!missing.empty()) throw_missing(missing, image_dir);

  // Stratified 4:1 split, shuffled per class under one seeded generator.
  std::vector<std::vector<std::size_t>> by_class(result.dataset.class_names.size());
  for (std::size_t i = 0; i < result.dataset.samples.size(); ++i) {
    by_class[static_cast<std::size_t>(result.dataset.samples[i].label)].push_back(i);
  }
  std::mt19937_64 rng(split_seed);
  for (auto& members : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    const std::size_t train = members.size() - expw_test_count(members.size());
    for (std::size_t k = 0; k < members.size(); ++k) {
      result.dataset.samples[members[k]].split = k < train ? Split::train : Split::test;
    }
  }

  result.manifest = summarize(result.dataset);
  result.manifest.filter = {{"rule", "confidence > threshold"},
                            {"confidence_threshold", confidence_threshold},
                            {"rows", rows},
                            {"removed", rejected},
                            {"split", "per-class shuffle, test = floor(n/5)"}};
  result.manifest.split_seed = split_seed;
  attach_reference(result.manifest, expw_reference());
  return result;
}

IngestResult ingest_folder(const fs::path& image_dir, const fs::path& labels_tsv, const std::string& name) {
  const auto lines = read_lines(labels_tsv, "label table");
  IngestResult result;
  result.dataset.name = name;
  std::map<std::string, int> class_index;
  std::vector<std::string> missing;
  // Class order follows the optional "# classes:" line, else first appearance.
  std::size_t first = 0;
  if (!lines.empty() && lines[0].rfind("# classes:", 0) == 0) {
    for (const auto& c : split_ws(lines[0].substr(10))) {
      class_index.emplace(c, static_cast<int>(result.dataset.class_names.size()));
      result.dataset.class_names.push_back(c);
    }
    first = 1;
  }
  if (first < lines.size() && lines[first].rfind("file\t", 0) == 0) ++first;
  for (std::size_t i = first; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    const auto fields = split_on(lines[i], '\t');
    if (fields.size() != 3) {
      throw DataFormatError(fmt::format("{}:{}: expected file<TAB>class<TAB>split", labels_tsv.string(), i + 1));
    }
    auto [it, inserted] = class_index.emplace(fields[1], static_cast<int>(result.dataset.class_names.size()));
    if (inserted) result.dataset.class_names.push_back(fields[1]);
    const fs::path path = image_dir / fields[0];
    if (!fs::is_regular_file(path)) {
      missing.push_back(fields[0]);
      continue;
    }
    LabeledFace face;
    face.image = read_image(path);
    face.label = it->second;
    face.split = split_from_name(fields[2]);
    face.source_id = stem_of(fields[0]);
    const fs::path sidecar = fs::path(path).replace_extension(".lmk");
    if (fs::is_regular_file(sidecar)) face.landmarks = read_landmarks(sidecar);
    result.dataset.samples.push_back(std::move(face));
  }
  if (!missing.empty()) throw_missing(missing, image_dir);
  result.manifest = summarize(result.dataset);
  result.manifest.filter = {{"rule", "labeled folder pass-through"}};
  return result;
}

void write_labeled_folder(const fs::path& dir, const Dataset& dataset) {
  fs::create_directories(dir);
  std::ofstream labels(dir / "labels.tsv", std::ios::trunc);
  if (!labels) throw std::runtime_error("cannot write " + (dir / "labels.tsv").string());
  labels << "# classes:";
  for (const auto& c : dataset.class_names) labels << ' ' << c;
  labels << "\nfile\tclass\tsplit\n";
  for (const auto& s : dataset.samples) {
    const std::string file = s.source_id + ".pgm";
    write_pgm(dir / file, s.image);
    if (s.landmarks) write_landmarks(dir / (s.source_id + ".lmk"), *s.landmarks);
    labels << file << '\t' << dataset.class_names[static_cast<std::size_t>(s.label)] << '\t' << split_name(s.split)
           << '\n';
  }
}

void write_store(const fs::path& dir, const Dataset& dataset, const DatasetManifest& manifest) {
  const fs::path images = dir / "images";
  fs::create_directories(images);
  std::ofstream index(dir / "index.tsv", std::ios::trunc);
  if (!index) throw std::runtime_error("cannot write " + (dir / "index.tsv").string());
  index << "source_id\tlabel\tsplit\n";
  for (const auto& s : dataset.samples) {
    write_pgm(images / (s.source_id + ".pgm"), s.image);
    if (s.landmarks) write_landmarks(images / (s.source_id + ".lmk"), *s.landmarks);
    index << s.source_id << '\t' << s.label << '\t' << split_name(s.split) << '\n';
  }
  std::ofstream m(dir / "manifest.json", std::ios::trunc);
  if (!m) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
  m << manifest.to_json().dump(2) << '\n';
}

IngestResult read_store(const fs::path& dir) {
  IngestResult result;
  std::ifstream m(dir / "manifest.json");
  if (!m) throw DataFormatError("no manifest.json in store '" + dir.string() + "'");
  try {
    result.manifest = DatasetManifest::from_json(nlohmann::json::parse(m));
  } catch (const nlohmann::json::exception& e) {
    throw DataFormatError(fmt::format("{}: {}", (dir / "manifest.json").string(), e.what()));
  }
  result.dataset.name = result.manifest.name;
  result.dataset.class_names = result.manifest.class_names;
  const auto lines = read_lines(dir / "index.tsv", "store index");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    const auto fields = split_on(lines[i], '\t');
    const auto label = fields.size() == 3 ? parse_number<int>(fields[1]) : std::nullopt;
    if (!label) throw DataFormatError(fmt::format("{}:{}: malformed index row", (dir / "index.tsv").string(), i + 1));
    LabeledFace face;
    face.source_id = fields[0];
    face.label = *label;
    face.split = split_from_name(fields[2]);
    face.image = read_image(dir / "images" / (fields[0] + ".pgm"));
    const fs::path sidecar = dir / "images" / (fields[0] + ".lmk");
    if (fs::is_regular_file(sidecar)) face.landmarks = read_landmarks(sidecar);
    result.dataset.samples.push_back(std::move(face));
  }
  const DatasetManifest counted = summarize(result.dataset);
  if (counted.train_counts != result.manifest.train_counts || counted.test_counts != result.manifest.test_counts) {
    throw DataFormatError(fmt::format("store '{}': index.tsv counts disagree with manifest.json", dir.string()));
  }
  return result;
}

}  // namespace frxa
