#include "snndse/mnist.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

#include <zlib.h>

namespace snndse {

namespace {

std::vector<unsigned char> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open IDX file '" + path.string() + "'");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (path.extension() != ".gz") return bytes;

    std::vector<unsigned char> out;
    out.reserve(bytes.size() * 4);
    z_stream zs{};
    if (inflateInit2(&zs, 15 + 32) != Z_OK)  // accept gzip and zlib wrappers
        throw ParseError("zlib init failed for '" + path.string() + "'");
    zs.next_in = bytes.data();
    zs.avail_in = static_cast<uInt>(bytes.size());
    unsigned char buf[1 << 16];
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        zs.next_out = buf;
        zs.avail_out = sizeof(buf);
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw ParseError("corrupt gzip stream in '" + path.string() + "'");
        }
        out.insert(out.end(), buf, buf + (sizeof(buf) - zs.avail_out));
    }
    inflateEnd(&zs);
    return out;
}

std::uint32_t read_be32(const unsigned char* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

std::string hex32(std::uint32_t v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "0x%08x", v);
    return buf;
}

void check_magic(const std::filesystem::path& path, std::uint32_t actual, std::uint32_t expected) {
    if (actual != expected)
        throw ParseError("IDX file '" + path.string() + "': magic mismatch, expected " +
                         hex32(expected) + " but found " + hex32(actual));
}

std::filesystem::path resolve(const std::filesystem::path& dir, const char* name) {
    std::filesystem::path plain = dir / name;
    if (std::filesystem::exists(plain)) return plain;
    std::filesystem::path gz = dir / (std::string(name) + ".gz");
    if (std::filesystem::exists(gz)) return gz;
    throw ParseError("MNIST file '" + plain.string() + "' not found (plain or .gz)");
}

}  // namespace

Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path) {
    const auto img = read_file_bytes(images_path);
    if (img.size() < 16) throw ParseError("IDX file '" + images_path.string() + "' is truncated");
    check_magic(images_path, read_be32(img.data()), 0x00000803u);
    const std::uint32_t count = read_be32(img.data() + 4);
    const std::uint32_t rows = read_be32(img.data() + 8);
    const std::uint32_t cols = read_be32(img.data() + 12);
    const std::size_t pixel_count = std::size_t(count) * rows * cols;
    if (img.size() != 16 + pixel_count)
        throw ParseError("IDX file '" + images_path.string() + "': payload size " +
                         std::to_string(img.size() - 16) + " does not match header (" +
                         std::to_string(pixel_count) + " pixels)");

    const auto lab = read_file_bytes(labels_path);
    if (lab.size() < 8) throw ParseError("IDX file '" + labels_path.string() + "' is truncated");
    check_magic(labels_path, read_be32(lab.data()), 0x00000801u);
    const std::uint32_t label_count = read_be32(lab.data() + 4);
    if (lab.size() != 8 + label_count)
        throw ParseError("IDX file '" + labels_path.string() + "': payload size mismatch");
    if (label_count != count)
        throw ParseError("IDX pair mismatch: " + std::to_string(count) + " images in '" +
                         images_path.string() + "' vs " + std::to_string(label_count) +
                         " labels in '" + labels_path.string() + "'");

    Dataset d;
    d.dims = static_cast<int>(rows * cols);
    d.pixels.resize(pixel_count);
    for (std::size_t i = 0; i < pixel_count; ++i)
        d.pixels[i] = static_cast<float>(img[16 + i]) * (1.0f / 255.0f);
    d.labels.assign(lab.begin() + 8, lab.end());
    d.validate();
    return d;
}

MnistData load_mnist(const std::filesystem::path& dir) {
    MnistData m;
    m.train = load_idx(resolve(dir, "train-images-idx3-ubyte"),
                       resolve(dir, "train-labels-idx1-ubyte"));
    m.test = load_idx(resolve(dir, "t10k-images-idx3-ubyte"),
                      resolve(dir, "t10k-labels-idx1-ubyte"));
    return m;
}

}  // namespace snndse
