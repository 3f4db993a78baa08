#pragma once

#include <filesystem>

#include "snndse/trainer.hpp"

namespace snndse {

// IDX readers, bit-exact: images carry magic 0x00000803, labels 0x00000801,
// big-endian dimension words, unsigned byte payload. Pixels are scaled by
// 1/255. Files ending in ".gz" are inflated transparently.
[[nodiscard]] Dataset load_idx(const std::filesystem::path& images_path,
                               const std::filesystem::path& labels_path);

struct MnistData {
    Dataset train;
    Dataset test;
};

// Loads the four canonical files from a directory, accepting either plain
// or ".gz" variants of train-images-idx3-ubyte, train-labels-idx1-ubyte,
// t10k-images-idx3-ubyte and t10k-labels-idx1-ubyte.
[[nodiscard]] MnistData load_mnist(const std::filesystem::path& dir);

}  // namespace snndse
