#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "exwave/field.hpp"

namespace exwave {

/// A labeled grayscale image set in memory. Images are stored flat,
/// row-major, `rows * cols` bytes each.
struct Dataset {
    int rows = 0;
    int cols = 0;
    std::vector<uint8_t> images;  // count * rows * cols bytes
    std::vector<uint8_t> labels;  // one class index per image

    size_t count() const { return labels.size(); }
    const uint8_t* image(size_t i) const {
        return images.data() + i * static_cast<size_t>(rows) * cols;
    }
};

/// Parse an IDX image/label file pair. Gzip input (magic 0x1F 0x8B) is
/// decompressed transparently. Validates the IDX magics, matching counts and
/// label range.
Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path);

/// Emit a dataset as a raw (uncompressed) IDX pair.
void write_idx(const std::filesystem::path& images_path,
               const std::filesystem::path& labels_path, const Dataset& ds);

/// Nearest-neighbor square resize. Integer upscale factors replicate each
/// source pixel into an exact k-by-k block.
std::vector<uint8_t> resize_nearest(const uint8_t* src, int src_side, int dst_side);

/// Amplitude encoding: field_p = byte_p / 255 (real, zero phase).
ComplexField encode_amplitude(const std::vector<uint8_t>& img, int side);

/// Convenience: resize image i of a dataset to `side` and encode it.
ComplexField encode_sample(const Dataset& ds, size_t index, int side);

/// Seeded permutation of [0, count) cut into batches; the final partial
/// batch is kept. Deterministic in (seed, epoch).
std::vector<std::vector<uint32_t>> batches(size_t count, int batch_size, uint64_t seed,
                                           int epoch);

/// Standard file names of the four IDX files of one dataset, as published.
struct IdxFileNames {
    std::string train_images, train_labels, test_images, test_labels;
};
IdxFileNames idx_file_names();

/// Locate `name[.gz]` under dir; throws with the expected names if neither
/// exists.
std::filesystem::path find_idx_file(const std::filesystem::path& dir, const std::string& name);

}  // namespace exwave
