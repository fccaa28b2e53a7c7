#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "rightsizer/featurizer.h"
#include "rightsizer/perf_model.h"

namespace rightsizer {

struct CatalogFunction {
  FunctionProfile profile;
  std::vector<InputDescriptor> inputs;
};

// Function profiles and the inputs they are invoked with.
//
// Text format, one record per line, '#' starts a comment:
//
//   function name=matmult input_type=matrix trigger=storage work_a=2e-10
//            work_b=3 work_c=0.2 scale_attr=rows parallel_fraction=0.97
//            k_sat=24 mem_base_mb=150 mem_per_byte=1.5e-6
//            cold_start_ms=900 timeout_s=300
//   input function=matmult id=mm-4000 size_bytes=128000000
//         featurize_cost_ms=27 rows=4000 cols=4000 density=1
//
// (each record on a single line). Every key other than function/id/
// size_bytes/featurize_cost_ms on an input line is a feature attribute; it
// must match the schema of the function's input type.
class Catalog {
 public:
  static Catalog Load(const std::filesystem::path& path);
  static Catalog Parse(std::istream& in, std::string_view source = "catalog");

  // Adds a function; throws InputError on duplicates or invalid profiles.
  void AddFunction(FunctionProfile profile);
  // Adds an input to an existing function after validating it.
  void AddInput(std::string_view function, InputDescriptor input);

  const std::vector<CatalogFunction>& functions() const { return functions_; }
  const CatalogFunction* Find(std::string_view function) const;
  const CatalogFunction& Get(std::string_view function) const;
  const InputDescriptor& GetInput(std::string_view function,
                                  std::string_view input_id) const;
  size_t num_pairs() const;
  bool empty() const { return functions_.empty(); }

 private:
  CatalogFunction* MutableFind(std::string_view function);

  std::vector<CatalogFunction> functions_;
};

}  // namespace rightsizer
