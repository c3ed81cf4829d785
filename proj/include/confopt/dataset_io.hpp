#pragma once

#include <filesystem>
#include <optional>

#include "confopt/sample.hpp"

namespace confopt {

/// Reads `f1,...,fd,label` with a header row and 1-based integer labels. The class count is
/// the largest label unless `classes` is given (which must be at least that large).
/// Unreadable files and malformed rows raise IoError naming the line.
LabeledSample read_dataset_csv(const std::filesystem::path& path, std::optional<int> classes = std::nullopt);

void write_dataset_csv(const std::filesystem::path& path, const LabeledSample& sample);

}  // namespace confopt
