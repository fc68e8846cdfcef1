#pragma once

#include <filesystem>

#include "exwave/training.hpp"

namespace exwave {

/// Download the four IDX files of a dataset into dir (gzip form, standard
/// names). Valid files already present are kept; corrupt ones are replaced.
/// Every slot is written via a temp file + rename, never partially.
void fetch_dataset(DatasetKind kind, const std::filesystem::path& dir);

}  // namespace exwave
