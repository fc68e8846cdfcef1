#pragma once

#include <filesystem>

#include "exwave/network.hpp"

namespace exwave {

/// Versioned binary model record: geometry, per-layer (mode, q, phases),
/// accumulation weights and the master seed. Doubles are stored as raw
/// little-endian IEEE 754 bits, so a save/load round trip is bit exact.
void save_checkpoint(const std::filesystem::path& path, const Network& net);

Network load_checkpoint(const std::filesystem::path& path);

}  // namespace exwave
