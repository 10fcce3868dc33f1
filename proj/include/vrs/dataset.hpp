#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vrs/model.hpp"

namespace vrs {

enum class Binarize { threshold, sample };

Binarize parse_binarize(const std::string& name);
std::string to_string(Binarize mode);

struct Dataset {
    std::vector<Observation> images;
    std::vector<std::uint8_t> labels;  // empty when no label file was given
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::string split = "all";
    std::string source;
    Binarize binarize = Binarize::threshold;

    std::size_t size() const noexcept { return images.size(); }
    std::size_t dim() const noexcept { return rows * cols; }

    // Images [begin, end) tagged with a new split name.
    Dataset slice(std::size_t begin, std::size_t end, std::string split_name) const;
};

struct DatasetSplits {
    Dataset train;
    Dataset valid;
    Dataset test;
};

// 50,000 / 10,000 train/validation split of the 60,000-image MNIST training
// file, plus the 10,000-image test file.
DatasetSplits standard_mnist_split(const Dataset& train_file, const Dataset& test_file);

// Parses IDX bytes (images: magic 0x00000803 and big-endian n, rows, cols;
// labels: magic 0x00000801 and n). Pixels are scaled by 1/255, then either
// thresholded at 0.5 or replaced by a Bernoulli draw seeded with `seed`.
Dataset parse_idx(std::span<const std::uint8_t> images, std::optional<std::span<const std::uint8_t>> labels,
                  Binarize mode, std::uint64_t seed = 0);

Dataset ingest_idx(const std::string& images_path, const std::optional<std::string>& labels_path, Binarize mode,
                   std::uint64_t seed = 0);

// Serializes a binary dataset back to IDX image bytes (0 -> 0, 1 -> 255).
std::vector<std::uint8_t> encode_idx_images(std::span<const Observation> images, std::size_t rows,
                                            std::size_t cols);

}  // namespace vrs
