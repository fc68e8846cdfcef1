#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace exwave {

/// Binary PGM (P5, maxval 255).
void write_pgm(const std::filesystem::path& path, const std::vector<uint8_t>& pixels,
               int width, int height);

struct PgmImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> pixels;
};

PgmImage read_pgm(const std::filesystem::path& path);

}  // namespace exwave
