#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mtensor/generate.hpp"
#include "mtensor/npa.hpp"
#include "mtensor/tensor.hpp"

namespace mtensor {

inline constexpr int kFormatVersion = 1;

/// Malformed file content; the message names the offending field.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// {"format": 1, "m": int, "n": int, "entries": [[i1, ..., im, value], ...]},
/// 0-based indices, duplicates accumulated on load.
[[nodiscard]] nlohmann::json tensor_to_json(const SquareTensor& A);
[[nodiscard]] SquareTensor tensor_from_json(const nlohmann::json& doc);

/// Tensor fields plus "b": [...], "planted": [...] | null, "seed": int and
/// "recipe": string.
[[nodiscard]] nlohmann::json instance_to_json(const ProblemInstance& inst);
[[nodiscard]] ProblemInstance instance_from_json(const nlohmann::json& doc);

[[nodiscard]] ProblemInstance load_instance(const std::filesystem::path& path);
void save_instance(const std::filesystem::path& path, const ProblemInstance& inst);

/// "%.16e".
[[nodiscard]] std::string format_real(double value);

/// Header `iter,ReErr,card_I,p,q`, one LF-terminated row per trace record.
void write_trace_csv(std::ostream& out, const std::vector<IterationRecord>& trace);

[[nodiscard]] nlohmann::json report_to_json(const SolveReport& report);

/// Parses "v1,v2,..." into a vector.
[[nodiscard]] Vector parse_vector(std::string_view text);

}  // namespace mtensor
