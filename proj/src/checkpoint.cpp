#include "exwave/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace exwave {

namespace {

constexpr char kMagic[8] = {'E', 'X', 'W', 'C', 'K', 'P', 'T', '\0'};
constexpr uint32_t kVersion = 1;

void put_u32(std::ofstream& out, uint32_t v) {
    const uint8_t b[4] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8),
                          static_cast<uint8_t>(v >> 16), static_cast<uint8_t>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ofstream& out, uint64_t v) {
    put_u32(out, static_cast<uint32_t>(v));
    put_u32(out, static_cast<uint32_t>(v >> 32));
}

void put_f64(std::ofstream& out, double v) { put_u64(out, std::bit_cast<uint64_t>(v)); }

struct Reader {
    std::ifstream in;
    std::string path;

    explicit Reader(const std::filesystem::path& p) : in(p, std::ios::binary), path(p.string()) {
        if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    }

    void bytes(void* dst, size_t count) {
        in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(count));
        if (in.gcount() != static_cast<std::streamsize>(count)) {
            throw std::runtime_error("truncated checkpoint: " + path);
        }
    }

    uint32_t u32() {
        uint8_t b[4];
        bytes(b, 4);
        return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
               (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
    }

    uint64_t u64() {
        const uint64_t lo = u32();
        return lo | (static_cast<uint64_t>(u32()) << 32);
    }

    double f64() { return std::bit_cast<double>(u64()); }
};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Network& net) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path.string());
    out.write(kMagic, sizeof(kMagic));
    put_u32(out, kVersion);
    put_u32(out, static_cast<uint32_t>(net.side));
    put_u32(out, static_cast<uint32_t>(net.layer_count()));
    put_u32(out, net.express_enabled ? 1 : 0);
    const PropagationGeometry& g = net.kernel->geometry();
    put_f64(out, g.pitch);
    put_f64(out, g.wavelength);
    put_f64(out, g.spacing);
    put_u64(out, net.master_seed);
    for (int l = 0; l < net.layer_count(); ++l) {
        const WaveletLayer& layer = net.layers[l];
        put_u32(out, layer.mode == PhaseMode::dense ? 1 : 0);
        put_u32(out, static_cast<uint32_t>(layer.mode == PhaseMode::dense ? 0 : layer.map.qx));
        put_u32(out, static_cast<uint32_t>(layer.mode == PhaseMode::dense ? 0 : layer.map.qy));
        put_u64(out, layer.phases.size());
        for (double p : layer.phases) put_f64(out, p);
    }
    put_u64(out, net.express_weights.size());
    for (double w : net.express_weights) put_f64(out, w);
    if (!out) throw std::runtime_error("write failure: " + path.string());
}

Network load_checkpoint(const std::filesystem::path& path) {
    Reader r(path);
    char magic[8];
    r.bytes(magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0) {
        throw std::runtime_error("not a checkpoint (bad magic): " + path.string());
    }
    const uint32_t version = r.u32();
    if (version != kVersion) {
        throw std::runtime_error("unsupported checkpoint version " + std::to_string(version) +
                                 " in " + path.string());
    }
    Network net;
    net.side = static_cast<int>(r.u32());
    const uint32_t layer_count = r.u32();
    net.express_enabled = r.u32() != 0;
    const double pitch = r.f64();
    const double wavelength = r.f64();
    const double spacing = r.f64();
    net.master_seed = r.u64();
    net.kernel = build_rs_kernel(PropagationGeometry(net.side, pitch, wavelength, spacing));
    net.detector = DetectorLayout::standard(net.side);
    for (uint32_t l = 0; l < layer_count; ++l) {
        const bool dense = r.u32() != 0;
        const int qx = static_cast<int>(r.u32());
        const int qy = static_cast<int>(r.u32());
        const uint64_t count = r.u64();
        std::vector<double> phases(count);
        for (double& p : phases) p = r.f64();
        if (dense) {
            net.layers.push_back(make_dense_layer(net.side, std::move(phases)));
        } else {
            net.layers.push_back(
                make_wavelet_layer(build_circle_map(net.side, qx, qy), std::move(phases)));
        }
    }
    const uint64_t express_count = r.u64();
    net.express_weights.resize(express_count);
    for (double& w : net.express_weights) w = r.f64();
    if (net.express_enabled && express_count != layer_count) {
        throw std::runtime_error("corrupt checkpoint: weight count mismatch in " +
                                 path.string());
    }
    return net;
}

}  // namespace exwave
