#include "rightsizer/catalog.h"

#include <fstream>
#include <map>
#include <sstream>

#include "rightsizer/csv.h"
#include "rightsizer/error.h"

namespace rightsizer {
namespace {

using Fields = std::map<std::string, std::string, std::less<>>;

Fields ParseFields(std::istringstream& tokens, const std::string& where) {
  Fields fields;
  std::string token;
  while (tokens >> token) {
    auto eq = token.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw InputError(where + ": expected key=value, got '" + token + "'");
    }
    auto [it, inserted] =
        fields.emplace(token.substr(0, eq), token.substr(eq + 1));
    if (!inserted) throw InputError(where + ": duplicate key '" + it->first + "'");
  }
  return fields;
}

std::string Take(Fields& fields, std::string_view key, const std::string& where) {
  auto it = fields.find(key);
  if (it == fields.end()) {
    throw InputError(where + ": missing '" + std::string(key) + "'");
  }
  std::string value = it->second;
  fields.erase(it);
  return value;
}

template <typename T>
void TakeOptional(Fields& fields, std::string_view key, T& out,
                  const std::string& where) {
  auto it = fields.find(key);
  if (it == fields.end()) return;
  std::string what = where + " " + std::string(key);
  if constexpr (std::is_same_v<T, int>) {
    out = static_cast<int>(ParseInt(it->second, what));
  } else {
    out = ParseDouble(it->second, what);
  }
  fields.erase(it);
}

FunctionProfile ParseFunction(Fields fields, const std::string& where) {
  FunctionProfile p;
  p.name = Take(fields, "name", where);
  auto type = ParseInputType(Take(fields, "input_type", where));
  if (!type) throw InputError(where + ": unknown input_type");
  p.input_type = *type;
  p.trigger = *type == InputType::kPayload ? Trigger::kApi : Trigger::kStorage;
  if (auto it = fields.find("trigger"); it != fields.end()) {
    auto trigger = ParseTrigger(it->second);
    if (!trigger) throw InputError(where + ": unknown trigger '" + it->second + "'");
    p.trigger = *trigger;
    fields.erase(it);
  }
  if (auto it = fields.find("scale_attr"); it != fields.end()) {
    p.scale_attr = it->second;
    fields.erase(it);
  }
  TakeOptional(fields, "work_a", p.work_a, where);
  TakeOptional(fields, "work_b", p.work_b, where);
  TakeOptional(fields, "work_c", p.work_c, where);
  TakeOptional(fields, "parallel_fraction", p.parallel_fraction, where);
  TakeOptional(fields, "k_sat", p.k_sat, where);
  TakeOptional(fields, "mem_base_mb", p.mem_base_mb, where);
  TakeOptional(fields, "mem_per_byte", p.mem_per_byte, where);
  TakeOptional(fields, "cold_start_ms", p.cold_start_ms, where);
  TakeOptional(fields, "timeout_s", p.timeout_s, where);
  if (!fields.empty()) {
    throw InputError(where + ": unknown function key '" + fields.begin()->first + "'");
  }
  return p;
}

InputDescriptor ParseInput(Fields fields, InputType type, const std::string& where) {
  InputDescriptor d;
  d.input_id = Take(fields, "id", where);
  d.input_type = type;
  int64_t size = 0;
  if (auto it = fields.find("size_bytes"); it != fields.end()) {
    size = ParseInt(it->second, where + " size_bytes");
    fields.erase(it);
  }
  if (size < 0) throw InputError(where + ": size_bytes must be >= 0");
  d.size_bytes = static_cast<uint64_t>(size);
  TakeOptional(fields, "featurize_cost_ms", d.featurize_cost_ms, where);
  for (const auto& [key, value] : fields) {
    double number = 0.0;
    try {
      number = ParseDouble(value, key);
      d.attrs.emplace(key, number);
    } catch (const InputError&) {
      d.attrs.emplace(key, value);
    }
  }
  return d;
}

}  // namespace

Catalog Catalog::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open catalog '" + path.string() + "'");
  return Parse(in, path.string());
}

Catalog Catalog::Parse(std::istream& in, std::string_view source) {
  Catalog catalog;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream tokens(line);
    std::string kind;
    if (!(tokens >> kind)) continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    Fields fields = ParseFields(tokens, where);
    try {
      if (kind == "function") {
        catalog.AddFunction(ParseFunction(std::move(fields), where));
      } else if (kind == "input") {
        std::string function = Take(fields, "function", where);
        const CatalogFunction* fn = catalog.Find(function);
        if (fn == nullptr) {
          throw InputError(where + ": input for undeclared function '" + function + "'");
        }
        catalog.AddInput(function,
                         ParseInput(std::move(fields), fn->profile.input_type, where));
      } else {
        throw InputError(where + ": unknown record kind '" + kind + "'");
      }
    } catch (const InputError& e) {
      std::string msg = e.what();
      if (msg.rfind(where, 0) == 0) throw;
      throw InputError(where + ": " + msg);
    }
  }
  return catalog;
}

void Catalog::AddFunction(FunctionProfile profile) {
  ValidateProfile(profile);
  if (Find(profile.name) != nullptr) {
    throw InputError("duplicate function '" + profile.name + "'");
  }
  functions_.push_back({std::move(profile), {}});
}

void Catalog::AddInput(std::string_view function, InputDescriptor input) {
  CatalogFunction* fn = MutableFind(function);
  if (fn == nullptr) {
    throw InputError("unknown function '" + std::string(function) + "'");
  }
  if (input.input_type != fn->profile.input_type) {
    throw InputError("input '" + input.input_id + "' has the wrong input type");
  }
  ValidateDescriptor(input);
  for (const auto& existing : fn->inputs) {
    if (existing.input_id == input.input_id) {
      throw InputError("duplicate input '" + input.input_id + "'");
    }
  }
  if (!(WorkSeconds(fn->profile, input) > 0.0)) {
    throw InputError("input '" + input.input_id + "' has non-positive work");
  }
  fn->inputs.push_back(std::move(input));
}

const CatalogFunction* Catalog::Find(std::string_view function) const {
  for (const auto& fn : functions_) {
    if (fn.profile.name == function) return &fn;
  }
  return nullptr;
}

CatalogFunction* Catalog::MutableFind(std::string_view function) {
  for (auto& fn : functions_) {
    if (fn.profile.name == function) return &fn;
  }
  return nullptr;
}

const CatalogFunction& Catalog::Get(std::string_view function) const {
  const CatalogFunction* fn = Find(function);
  if (fn == nullptr) {
    throw InputError("unknown function '" + std::string(function) + "'");
  }
  return *fn;
}

const InputDescriptor& Catalog::GetInput(std::string_view function,
                                         std::string_view input_id) const {
  for (const auto& in : Get(function).inputs) {
    if (in.input_id == input_id) return in;
  }
  throw InputError("unknown input '" + std::string(input_id) + "' for function '" +
                   std::string(function) + "'");
}

size_t Catalog::num_pairs() const {
  size_t n = 0;
  for (const auto& fn : functions_) n += fn.inputs.size();
  return n;
}

}  // namespace rightsizer
