#include "rightsizer/featurizer.h"

#include <algorithm>
#include <array>
#include <cmath>

#include "rightsizer/error.h"

namespace rightsizer {
namespace {

constexpr std::array<std::pair<InputType, std::string_view>, 7> kTypeNames{{
    {InputType::kImage, "image"},
    {InputType::kMatrix, "matrix"},
    {InputType::kVideo, "video"},
    {InputType::kCsv, "csv"},
    {InputType::kJson, "json"},
    {InputType::kAudio, "audio"},
    {InputType::kPayload, "payload"},
}};

constexpr std::array<std::pair<Trigger, std::string_view>, 3> kTriggerNames{{
    {Trigger::kStorage, "storage"},
    {Trigger::kApi, "api"},
    {Trigger::kPreExtracted, "pre_extracted"},
}};

std::vector<FeatureSchema> BuildSchemas() {
  using K = FieldKind;
  return {
      {InputType::kImage,
       {{"width", K::kDimension},
        {"height", K::kDimension},
        {"channels", K::kDimension},
        {"dpi_x", K::kDimension},
        {"dpi_y", K::kDimension}}},
      {InputType::kMatrix,
       {{"rows", K::kDimension},
        {"cols", K::kDimension},
        {"density", K::kFraction}}},
      {InputType::kVideo,
       {{"width", K::kDimension},
        {"height", K::kDimension},
        {"duration_s", K::kDimension},
        {"bitrate_bps", K::kDimension},
        {"avg_frame_rate", K::kDimension},
        {"encoding", K::kCategory}}},
      {InputType::kCsv, {{"rows", K::kDimension}, {"cols", K::kDimension}}},
      {InputType::kJson, {{"outer_length", K::kDimension}}},
      {InputType::kAudio,
       {{"channels", K::kDimension},
        {"sample_rate", K::kDimension},
        {"duration_s", K::kDimension},
        {"bitrate_bps", K::kDimension},
        {"flac", K::kFlag}}},
      {InputType::kPayload, {{"value", K::kDimension}}, /*append_size=*/false},
  };
}

double CategoryCode(const std::string& tag) {
  const auto& vocab = VideoEncodings();
  auto it = std::find(vocab.begin(), vocab.end(), tag);
  return static_cast<double>(it - vocab.begin()) + 1.0;
}

}  // namespace

std::string_view ToString(InputType type) {
  for (const auto& [t, name] : kTypeNames) {
    if (t == type) return name;
  }
  return "unknown";
}

std::optional<InputType> ParseInputType(std::string_view name) {
  for (const auto& [t, n] : kTypeNames) {
    if (n == name) return t;
  }
  return std::nullopt;
}

std::string_view ToString(Trigger trigger) {
  for (const auto& [t, name] : kTriggerNames) {
    if (t == trigger) return name;
  }
  return "unknown";
}

std::optional<Trigger> ParseTrigger(std::string_view name) {
  for (const auto& [t, n] : kTriggerNames) {
    if (n == name) return t;
  }
  return std::nullopt;
}

const FeatureSchema& SchemaFor(InputType type) {
  static const std::vector<FeatureSchema> schemas = BuildSchemas();
  for (const auto& s : schemas) {
    if (s.input_type == type) return s;
  }
  throw InputError("no schema for input type");
}

const std::vector<std::string>& VideoEncodings() {
  static const std::vector<std::string> vocab{"h264", "hevc", "mpeg4",
                                              "vp9",  "av1",  "mjpeg"};
  return vocab;
}

void ValidateDescriptor(const InputDescriptor& desc) {
  const FeatureSchema& schema = SchemaFor(desc.input_type);
  const std::string where =
      "input '" + desc.input_id + "' (" + std::string(ToString(desc.input_type)) + ")";
  if (desc.attrs.size() != schema.fields.size()) {
    throw InputError(where + ": expected " +
                     std::to_string(schema.fields.size()) + " attrs, got " +
                     std::to_string(desc.attrs.size()));
  }
  for (const FieldSpec& field : schema.fields) {
    auto it = desc.attrs.find(field.name);
    if (it == desc.attrs.end()) {
      throw InputError(where + ": missing attr '" + field.name + "'");
    }
    if (field.kind == FieldKind::kCategory) {
      const auto* tag = std::get_if<std::string>(&it->second);
      const auto& vocab = VideoEncodings();
      if (tag == nullptr ||
          std::find(vocab.begin(), vocab.end(), *tag) == vocab.end()) {
        throw InputError(where + ": attr '" + field.name +
                         "' must be a known encoding tag");
      }
      continue;
    }
    const auto* value = std::get_if<double>(&it->second);
    if (value == nullptr || !std::isfinite(*value) || *value < 0.0) {
      throw InputError(where + ": attr '" + field.name +
                       "' must be a finite non-negative number");
    }
    if (field.kind == FieldKind::kFraction && *value > 1.0) {
      throw InputError(where + ": attr '" + field.name + "' must be in [0, 1]");
    }
    if (field.kind == FieldKind::kFlag && *value != 0.0 && *value != 1.0) {
      throw InputError(where + ": attr '" + field.name + "' must be 0 or 1");
    }
  }
  if (!(desc.featurize_cost_ms >= 0.0) || !std::isfinite(desc.featurize_cost_ms)) {
    throw InputError(where + ": featurize_cost_ms must be non-negative");
  }
}

FeatureVector Featurize(const InputDescriptor& desc) {
  ValidateDescriptor(desc);
  const FeatureSchema& schema = SchemaFor(desc.input_type);
  FeatureVector out;
  out.reserve(static_cast<size_t>(schema.dim()));
  for (const FieldSpec& field : schema.fields) {
    const AttrValue& v = desc.attrs.find(field.name)->second;
    if (field.kind == FieldKind::kCategory) {
      out.push_back(CategoryCode(std::get<std::string>(v)));
    } else {
      out.push_back(std::get<double>(v));
    }
  }
  if (schema.append_size) out.push_back(static_cast<double>(desc.size_bytes));
  return out;
}

double ExtractionLatencyMs(const InputDescriptor& desc, Trigger trigger) {
  return trigger == Trigger::kStorage ? desc.featurize_cost_ms : 0.0;
}

}  // namespace rightsizer
