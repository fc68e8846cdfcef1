#include "exwave/pgm.hpp"

#include <fstream>
#include <stdexcept>

namespace exwave {

void write_pgm(const std::filesystem::path& path, const std::vector<uint8_t>& pixels,
               int width, int height) {
    if (pixels.size() != static_cast<size_t>(width) * height) {
        throw std::invalid_argument("write_pgm: pixel count mismatch");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "P5\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(pixels.data()),
              static_cast<std::streamsize>(pixels.size()));
    if (!out) throw std::runtime_error("write failure: " + path.string());
}

PgmImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string magic;
    int width = 0, height = 0, maxval = 0;
    in >> magic >> width >> height >> maxval;
    if (magic != "P5" || maxval != 255 || width < 1 || height < 1) {
        throw std::runtime_error("unsupported PGM: " + path.string());
    }
    in.get();  // single whitespace after the header
    PgmImage img;
    img.width = width;
    img.height = height;
    img.pixels.resize(static_cast<size_t>(width) * height);
    in.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.pixels.size())) {
        throw std::runtime_error("truncated PGM: " + path.string());
    }
    return img;
}

}  // namespace exwave
