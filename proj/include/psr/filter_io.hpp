#pragma once

// Filter bank files: two concatenated PSNT records.
//   temporal: complex, dims (L+1, 1, 1), tag image
//   spatial:  complex, dims (kx, ky, frames), tag k-space; frames = 1 when shared

#include <filesystem>

#include "psr/hqs.hpp"

namespace psr {

void save_filters(const std::filesystem::path& path, const FilterBank& filters);
FilterBank load_filters(const std::filesystem::path& path);

}  // namespace psr
