#include "fetch.hpp"

#include <zlib.h>

#include <fstream>
#include <iostream>
#include <stdexcept>
#include <vector>

#include "httplib.h"

namespace exwave {

namespace {

struct Source {
    std::string host;  // scheme://host
    std::string base;  // path prefix ending in /
};

Source source_for(DatasetKind kind) {
    if (kind == DatasetKind::mnist) {
        return {"https://ossci-datasets.s3.amazonaws.com", "/mnist/"};
    }
    return {"http://fashion-mnist.s3-website.eu-central-1.amazonaws.com", "/"};
}

/// Decompressed IDX magic of a (possibly gzipped) file, or 0 if unreadable.
uint32_t idx_magic(const std::filesystem::path& path) {
    gzFile gz = gzopen(path.string().c_str(), "rb");
    if (!gz) return 0;
    uint8_t b[4];
    const int got = gzread(gz, b, 4);
    gzclose(gz);
    if (got != 4) return 0;
    return (static_cast<uint32_t>(b[0]) << 24) | (static_cast<uint32_t>(b[1]) << 16) |
           (static_cast<uint32_t>(b[2]) << 8) | static_cast<uint32_t>(b[3]);
}

void fetch_one(const Source& src, const std::string& name, uint32_t expected_magic,
               const std::filesystem::path& dir) {
    const std::filesystem::path target = dir / (name + ".gz");
    if (std::filesystem::exists(target) && idx_magic(target) == expected_magic) {
        std::cout << "  " << target.string() << " already valid, skipping\n";
        return;
    }
    if (std::filesystem::exists(dir / name) && idx_magic(dir / name) == expected_magic) {
        std::cout << "  " << (dir / name).string() << " already valid, skipping\n";
        return;
    }

    httplib::Client client(src.host);
    client.set_follow_location(true);
    client.set_connection_timeout(30);
    client.set_read_timeout(120);
    const std::string url_path = src.base + name + ".gz";
    std::cout << "  GET " << src.host << url_path << " ..." << std::flush;
    auto res = client.Get(url_path);
    if (!res || res->status != 200) {
        std::cout << "\n";
        throw std::runtime_error("download failed for " + src.host + url_path +
                                 (res ? " (HTTP " + std::to_string(res->status) + ")"
                                      : " (connection error)"));
    }
    const std::filesystem::path tmp = target.string() + ".part";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(res->body.data(), static_cast<std::streamsize>(res->body.size()));
    }
    if (idx_magic(tmp) != expected_magic) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("downloaded file failed the IDX magic check: " +
                                 target.string());
    }
    std::filesystem::rename(tmp, target);
    std::cout << " ok (" << res->body.size() << " bytes)\n";
}

}  // namespace

void fetch_dataset(DatasetKind kind, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const Source src = source_for(kind);
    const IdxFileNames names = idx_file_names();
    std::cout << "fetching " << dataset_name(kind) << " into " << dir.string() << "\n";
    fetch_one(src, names.train_images, 0x00000803, dir);
    fetch_one(src, names.train_labels, 0x00000801, dir);
    fetch_one(src, names.test_images, 0x00000803, dir);
    fetch_one(src, names.test_labels, 0x00000801, dir);
}

}  // namespace exwave
