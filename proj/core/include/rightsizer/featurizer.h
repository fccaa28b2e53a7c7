#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rightsizer/learner.h"

namespace rightsizer {

enum class InputType { kImage, kMatrix, kVideo, kCsv, kJson, kAudio, kPayload };

std::string_view ToString(InputType type);
std::optional<InputType> ParseInputType(std::string_view name);

// How an invocation was triggered. Only storage triggers pay for feature
// extraction on the critical path; objects already in the datastore were
// featurized in the background when they were written.
enum class Trigger { kStorage, kApi, kPreExtracted };

std::string_view ToString(Trigger trigger);
std::optional<Trigger> ParseTrigger(std::string_view name);

// Numeric attribute or a categorical tag (video encoding).
using AttrValue = std::variant<double, std::string>;

// Metadata describing one function input. Features are read from this record
// rather than decoded from the media itself.
struct InputDescriptor {
  std::string input_id;
  InputType input_type = InputType::kPayload;
  uint64_t size_bytes = 0;
  std::map<std::string, AttrValue, std::less<>> attrs;
  double featurize_cost_ms = 0.0;
};

enum class FieldKind {
  kDimension,  // non-negative real
  kFraction,   // in [0, 1]
  kFlag,       // 0 or 1
  kCategory,   // tag from a fixed vocabulary
};

struct FieldSpec {
  std::string name;
  FieldKind kind;
};

struct FeatureSchema {
  InputType input_type;
  std::vector<FieldSpec> fields;
  // size_bytes is appended after the declared fields (all types but payload).
  bool append_size = true;

  int dim() const {
    return static_cast<int>(fields.size()) + (append_size ? 1 : 0);
  }
};

const FeatureSchema& SchemaFor(InputType type);

// Video codecs recognized by the encoding feature, in code order (code 1 is
// the first entry).
const std::vector<std::string>& VideoEncodings();

// Throws InputError if the descriptor's attrs do not match its schema.
void ValidateDescriptor(const InputDescriptor& desc);

// Fixed-order feature vector: schema fields, then size_bytes.
FeatureVector Featurize(const InputDescriptor& desc);

// Feature extraction latency charged to the invocation's critical path.
double ExtractionLatencyMs(const InputDescriptor& desc, Trigger trigger);

}  // namespace rightsizer
