#pragma once

#include <string>
#include <string_view>

#include "kfr/policy.hpp"

namespace kfr {

inline constexpr int kCheckpointVersion = 1;

/// JSON document with the named arrays, feature order, instruction kinds and
/// format version.
std::string checkpoint_to_text(const PolicyParams& params);

/// Throws FormatError naming the field on any mismatch. A positive
/// `expected_k_max` additionally pins the count head size.
PolicyParams checkpoint_from_text(std::string_view text, int expected_k_max = 0);

void save_checkpoint(const PolicyParams& params, const std::string& path);
PolicyParams load_checkpoint(const std::string& path, int expected_k_max = 0);

/// Writes to a sibling temp file and renames over `path`.
void write_file_atomic(const std::string& path, std::string_view contents);

}  // namespace kfr
