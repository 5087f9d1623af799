#include "frxa/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <fmt/format.h>

namespace frxa {

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

namespace {

void put_u32le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint32_t get_u32le(std::string_view in, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  return v;
}

}  // namespace

nlohmann::json architecture_to_json(const ArchitectureConfig& config) {
  if (const auto* c = std::get_if<ClassifierConfig>(&config)) {
    return {{"kind", "classifier"},
            {"conv_plan", c->conv_plan},
            {"num_classes", c->num_classes},
            {"input_size", c->input_size}};
  }
  const auto& v = std::get<VisualizerConfig>(config);
  return {{"kind", "visualizer"},
          {"initial_channels", v.initial_channels},
          {"blocks", v.blocks},
          {"layers_per_block", v.layers_per_block},
          {"growth_rate", v.growth_rate},
          {"compression", v.compression},
          {"num_classes", v.num_classes},
          {"input_size", v.input_size}};
}

ArchitectureConfig architecture_from_json(const nlohmann::json& j) {
  const ModelKind kind = model_kind_from_string(j.at("kind").get<std::string>());
  if (kind == ModelKind::classifier) {
    ClassifierConfig c;
    c.conv_plan = j.at("conv_plan").get<std::vector<std::vector<std::size_t>>>();
    c.num_classes = j.at("num_classes").get<std::size_t>();
    c.input_size = j.at("input_size").get<std::size_t>();
    return c;
  }
  VisualizerConfig v;
  v.initial_channels = j.at("initial_channels").get<std::size_t>();
  v.blocks = j.at("blocks").get<std::size_t>();
  v.layers_per_block = j.at("layers_per_block").get<std::size_t>();
  v.growth_rate = j.at("growth_rate").get<std::size_t>();
  v.compression = j.at("compression").get<double>();
  v.num_classes = j.at("num_classes").get<std::size_t>();
  v.input_size = j.at("input_size").get<std::size_t>();
  return v;
}

ModelKind ModelCheckpoint::kind() const {
  return std::holds_alternative<ClassifierConfig>(architecture) ? ModelKind::classifier : ModelKind::visualizer;
}

Model ModelCheckpoint::instantiate() const {
  Model model = Model::build(architecture, 0);
  auto params = model.parameters();
  if (params.size() != tensors.size()) {
    throw CheckpointError(fmt::format("checkpoint holds {} tensors, architecture declares {}", tensors.size(),
                                      params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i]->id != tensors[i].id || params[i]->value.shape() != tensors[i].value.shape()) {
      throw CheckpointError(fmt::format("tensor {} is '{}' {} but the architecture expects '{}' {}", i, tensors[i].id,
                                        tensors[i].value.shape().str(), params[i]->id, params[i]->value.shape().str()));
    }
    params[i]->value = tensors[i].value;
  }
  return model;
}

ModelCheckpoint ModelCheckpoint::capture(const Model& model) {
  ModelCheckpoint ckpt;
  ckpt.architecture = model.config();
  for (const auto* p : model.parameters()) ckpt.tensors.push_back({p->id, p->trainable, p->value});
  return ckpt;
}

void ModelCheckpoint::require_classes(const std::vector<std::string>& classes) const {
  if (classes != class_names) {
    throw ClassMismatch(fmt::format("checkpoint classes [{}] differ from dataset classes [{}]",
                                    fmt::join(class_names, ", "), fmt::join(classes, ", ")));
  }
}

std::string serialize_checkpoint(const ModelCheckpoint& ckpt) {
  nlohmann::json header;
  header["format_version"] = kCheckpointVersion;
  header["architecture"] = architecture_to_json(ckpt.architecture);
  header["classes"] = ckpt.class_names;
  header["region"] = std::string(region_name(ckpt.region));
  header["padding"] = ckpt.padding;
  header["region_margin"] = ckpt.region_margin;
  header["normalization"] = {{"mean", ckpt.normalization.mean}, {"std", ckpt.normalization.std}};
  header["best_test_accuracy"] = ckpt.best_test_accuracy;
  header["training"] = ckpt.training;
  nlohmann::json manifest = nlohmann::json::array();
  for (const auto& t : ckpt.tensors) {
    const Shape s = t.value.shape();
    manifest.push_back({{"id", t.id}, {"shape", {s.n, s.c, s.h, s.w}}, {"trainable", t.trainable}});
  }
  header["tensors"] = manifest;

  const std::string text = header.dump();
  std::string out(kCheckpointMagic);
  put_u32le(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  for (const auto& t : ckpt.tensors) {
    for (float v : t.value.data()) put_u32le(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

ModelCheckpoint deserialize_checkpoint(std::string_view bytes) {
  if (bytes.size() < 9 || bytes.substr(0, 5) != kCheckpointMagic) throw CheckpointError("not a FRXA1 checkpoint");
  const std::uint32_t header_len = get_u32le(bytes, 5);
  if (bytes.size() < 9 + std::size_t{header_len}) throw CheckpointError("truncated checkpoint header");
  nlohmann::json header;
  ModelCheckpoint ckpt;
  std::size_t pos = 9 + header_len;
  try {
    header = nlohmann::json::parse(bytes.substr(9, header_len));
    if (header.at("format_version").get<int>() != kCheckpointVersion) {
      throw CheckpointError(fmt::format("unsupported checkpoint version {}", header["format_version"].dump()));
    }
    ckpt.architecture = architecture_from_json(header.at("architecture"));
    ckpt.class_names = header.at("classes").get<std::vector<std::string>>();
    ckpt.region = region_from_name(header.at("region").get<std::string>());
    ckpt.padding = header.at("padding").get<bool>();
    ckpt.region_margin = header.at("region_margin").get<double>();
    ckpt.normalization = {header.at("normalization").at("mean").get<double>(),
                          header.at("normalization").at("std").get<double>()};
    ckpt.best_test_accuracy = header.at("best_test_accuracy").get<double>();
    ckpt.training = header.at("training");
    for (const auto& entry : header.at("tensors")) {
      const auto dims = entry.at("shape").get<std::vector<std::size_t>>();
      if (dims.size() != 4) throw CheckpointError("tensor shape must have 4 dims");
      const Shape shape{dims[0], dims[1], dims[2], dims[3]};
      if (bytes.size() < pos + 4 * shape.size()) throw CheckpointError("truncated tensor data for " + entry.at("id").get<std::string>());
      std::vector<float> values(shape.size());
      for (std::size_t i = 0; i < values.size(); ++i, pos += 4) values[i] = std::bit_cast<float>(get_u32le(bytes, pos));
      ckpt.tensors.push_back({entry.at("id").get<std::string>(), entry.at("trainable").get<bool>(),
                              Tensor<float>(shape, std::move(values))});
    }
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint header: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("malformed checkpoint header: ") + e.what());
  }
  if (pos != bytes.size()) throw CheckpointError(fmt::format("{} trailing bytes after tensor data", bytes.size() - pos));
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const ModelCheckpoint& checkpoint) {
  const std::string bytes = serialize_checkpoint(checkpoint);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot write checkpoint " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError("short write to " + path.string());
}

ModelCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return deserialize_checkpoint(bytes);
}

}  // namespace frxa
