#include "exwave/data.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "exwave/rng.hpp"

namespace exwave {

namespace {

constexpr uint32_t kImagesMagic = 0x00000803;
constexpr uint32_t kLabelsMagic = 0x00000801;

// gzopen reads plain files unchanged and inflates gzip streams (detected by
// their 1F 8B magic), which is exactly the transparency the loader needs.
std::vector<uint8_t> read_file_maybe_gz(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw std::runtime_error("no such file: " + path.string());
    }
    gzFile gz = gzopen(path.string().c_str(), "rb");
    if (!gz) throw std::runtime_error("cannot open " + path.string());
    std::vector<uint8_t> out;
    uint8_t buf[1 << 16];
    int got;
    while ((got = gzread(gz, buf, sizeof(buf))) > 0) {
        out.insert(out.end(), buf, buf + got);
    }
    const bool ok = (got == 0);
    gzclose(gz);
    if (!ok) throw std::runtime_error("read error (truncated or corrupt): " + path.string());
    return out;
}

uint32_t read_be32(const std::vector<uint8_t>& buf, size_t offset, const std::string& what) {
    if (offset + 4 > buf.size()) throw std::runtime_error("truncated IDX header in " + what);
    return (static_cast<uint32_t>(buf[offset]) << 24) |
           (static_cast<uint32_t>(buf[offset + 1]) << 16) |
           (static_cast<uint32_t>(buf[offset + 2]) << 8) | static_cast<uint32_t>(buf[offset + 3]);
}

void write_be32(std::ofstream& out, uint32_t v) {
    const uint8_t bytes[4] = {static_cast<uint8_t>(v >> 24), static_cast<uint8_t>(v >> 16),
                              static_cast<uint8_t>(v >> 8), static_cast<uint8_t>(v)};
    out.write(reinterpret_cast<const char*>(bytes), 4);
}

}  // namespace

Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path) {
    const std::vector<uint8_t> img_buf = read_file_maybe_gz(images_path);
    const std::vector<uint8_t> lbl_buf = read_file_maybe_gz(labels_path);

    const uint32_t img_magic = read_be32(img_buf, 0, images_path.string());
    if (img_magic != kImagesMagic) {
        throw std::runtime_error("bad IDX image magic in " + images_path.string());
    }
    const uint32_t img_count = read_be32(img_buf, 4, images_path.string());
    const uint32_t rows = read_be32(img_buf, 8, images_path.string());
    const uint32_t cols = read_be32(img_buf, 12, images_path.string());
    const size_t pixel_bytes = static_cast<size_t>(img_count) * rows * cols;
    if (img_buf.size() != 16 + pixel_bytes) {
        throw std::runtime_error("truncated IDX image payload in " + images_path.string());
    }

    const uint32_t lbl_magic = read_be32(lbl_buf, 0, labels_path.string());
    if (lbl_magic != kLabelsMagic) {
        throw std::runtime_error("bad IDX label magic in " + labels_path.string());
    }
    const uint32_t lbl_count = read_be32(lbl_buf, 4, labels_path.string());
    if (lbl_buf.size() != 8 + lbl_count) {
        throw std::runtime_error("truncated IDX label payload in " + labels_path.string());
    }
    if (img_count != lbl_count) {
        throw std::runtime_error("image/label count mismatch: " + std::to_string(img_count) +
                                 " vs " + std::to_string(lbl_count));
    }

    Dataset ds;
    ds.rows = static_cast<int>(rows);
    ds.cols = static_cast<int>(cols);
    ds.images.assign(img_buf.begin() + 16, img_buf.end());
    ds.labels.assign(lbl_buf.begin() + 8, lbl_buf.end());
    for (size_t i = 0; i < ds.labels.size(); ++i) {
        if (ds.labels[i] > 9) {
            throw std::runtime_error("label out of range 0..9 at index " + std::to_string(i) +
                                     ": " + std::to_string(ds.labels[i]));
        }
    }
    return ds;
}

void write_idx(const std::filesystem::path& images_path,
               const std::filesystem::path& labels_path, const Dataset& ds) {
    {
        std::ofstream out(images_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + images_path.string());
        write_be32(out, kImagesMagic);
        write_be32(out, static_cast<uint32_t>(ds.count()));
        write_be32(out, static_cast<uint32_t>(ds.rows));
        write_be32(out, static_cast<uint32_t>(ds.cols));
        out.write(reinterpret_cast<const char*>(ds.images.data()),
                  static_cast<std::streamsize>(ds.images.size()));
    }
    {
        std::ofstream out(labels_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + labels_path.string());
        write_be32(out, kLabelsMagic);
        write_be32(out, static_cast<uint32_t>(ds.count()));
        out.write(reinterpret_cast<const char*>(ds.labels.data()),
                  static_cast<std::streamsize>(ds.labels.size()));
    }
}

std::vector<uint8_t> resize_nearest(const uint8_t* src, int src_side, int dst_side) {
    if (dst_side < 1) throw std::invalid_argument("resize_nearest: side must be >= 1");
    std::vector<uint8_t> out(static_cast<size_t>(dst_side) * dst_side);
    for (int y = 0; y < dst_side; ++y) {
        const int sy = static_cast<int>(static_cast<int64_t>(y) * src_side / dst_side);
        for (int x = 0; x < dst_side; ++x) {
            const int sx = static_cast<int>(static_cast<int64_t>(x) * src_side / dst_side);
            out[static_cast<size_t>(y) * dst_side + x] =
                src[static_cast<size_t>(sy) * src_side + sx];
        }
    }
    return out;
}

ComplexField encode_amplitude(const std::vector<uint8_t>& img, int side) {
    if (img.size() != static_cast<size_t>(side) * side) {
        throw std::invalid_argument("encode_amplitude: image size mismatch");
    }
    ComplexField f(side);
    for (size_t i = 0; i < img.size(); ++i) {
        f[i] = cdouble{img[i] / 255.0, 0.0};
    }
    return f;
}

ComplexField encode_sample(const Dataset& ds, size_t index, int side) {
    if (ds.rows != ds.cols) {
        throw std::invalid_argument("encode_sample: non-square source image");
    }
    return encode_amplitude(resize_nearest(ds.image(index), ds.rows, side), side);
}

std::vector<std::vector<uint32_t>> batches(size_t count, int batch_size, uint64_t seed,
                                           int epoch) {
    if (batch_size < 1) throw std::invalid_argument("batches: batch_size must be >= 1");
    std::vector<uint32_t> order(count);
    for (size_t i = 0; i < count; ++i) order[i] = static_cast<uint32_t>(i);
    Rng rng(derive_stream(seed, "shuffle", static_cast<uint64_t>(epoch)));
    for (size_t i = count; i > 1; --i) {  // Fisher-Yates
        std::swap(order[i - 1], order[rng.below(i)]);
    }
    std::vector<std::vector<uint32_t>> out;
    for (size_t start = 0; start < count; start += batch_size) {
        const size_t end = std::min(count, start + batch_size);
        out.emplace_back(order.begin() + start, order.begin() + end);
    }
    return out;
}

IdxFileNames idx_file_names() {
    return {"train-images-idx3-ubyte", "train-labels-idx1-ubyte", "t10k-images-idx3-ubyte",
            "t10k-labels-idx1-ubyte"};
}

std::filesystem::path find_idx_file(const std::filesystem::path& dir, const std::string& name) {
    const std::filesystem::path raw = dir / name;
    if (std::filesystem::exists(raw)) return raw;
    const std::filesystem::path gz = dir / (name + ".gz");
    if (std::filesystem::exists(gz)) return gz;
    throw std::runtime_error("dataset file not found: expected " + raw.string() + " or " +
                             gz.string());
}

}  // namespace exwave
