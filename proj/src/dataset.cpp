#include "vrs/dataset.hpp"

#include <fstream>
#include <iterator>

#include "vrs/errors.hpp"
#include "vrs/rng.hpp"

namespace vrs {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::uint32_t be32(std::span<const std::uint8_t> bytes, std::size_t offset, const char* what) {
    if (offset + 4 > bytes.size()) throw FormatError(std::string("IDX: truncated ") + what, bytes.size());
    return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
           (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open data file '" + path + "'");
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

Binarize parse_binarize(const std::string& name) {
    if (name == "threshold") return Binarize::threshold;
    if (name == "sample") return Binarize::sample;
    throw ConfigError("binarize: unknown mode '" + name + "' (expected threshold or sample)");
}

std::string to_string(Binarize mode) { return mode == Binarize::threshold ? "threshold" : "sample"; }

Dataset Dataset::slice(std::size_t begin, std::size_t end, std::string split_name) const {
    if (begin > end || end > images.size()) throw ShapeError("Dataset::slice: range out of bounds");
    Dataset out = *this;
    out.images.assign(images.begin() + static_cast<std::ptrdiff_t>(begin),
                      images.begin() + static_cast<std::ptrdiff_t>(end));
    if (!labels.empty()) {
        out.labels.assign(labels.begin() + static_cast<std::ptrdiff_t>(begin),
                          labels.begin() + static_cast<std::ptrdiff_t>(end));
    }
    out.split = std::move(split_name);
    return out;
}

DatasetSplits standard_mnist_split(const Dataset& train_file, const Dataset& test_file) {
    if (train_file.size() != 60000 || test_file.size() != 10000) {
        throw ShapeError("standard MNIST split needs 60,000 training and 10,000 test images");
    }
    return DatasetSplits{train_file.slice(0, 50000, "train"), train_file.slice(50000, 60000, "valid"),
                         test_file.slice(0, 10000, "test")};
}

Dataset parse_idx(std::span<const std::uint8_t> images, std::optional<std::span<const std::uint8_t>> labels,
                  Binarize mode, std::uint64_t seed) {
    const auto magic = be32(images, 0, "image header");
    if (magic != kImageMagic) throw FormatError("IDX: bad image magic", 0);
    const std::size_t n = be32(images, 4, "image header");
    const std::size_t rows = be32(images, 8, "image header");
    const std::size_t cols = be32(images, 12, "image header");
    const std::size_t dim = rows * cols;
    if (images.size() < 16 + n * dim) {
        throw FormatError("IDX: image data truncated (expected " + std::to_string(16 + n * dim) + " bytes)",
                          images.size());
    }

    Dataset ds;
    ds.rows = rows;
    ds.cols = cols;
    ds.binarize = mode;
    ds.images.assign(n, Observation(dim));
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            const double v = static_cast<double>(images[16 + i * dim + j]) / 255.0;
            ds.images[i][j] = mode == Binarize::threshold ? (v >= 0.5 ? 1 : 0) : (uniform01(rng) < v ? 1 : 0);
        }
    }

    if (labels) {
        const auto& lb = *labels;
        if (be32(lb, 0, "label header") != kLabelMagic) throw FormatError("IDX: bad label magic", 0);
        const std::size_t m = be32(lb, 4, "label header");
        if (m != n) throw ShapeError("IDX: " + std::to_string(m) + " labels for " + std::to_string(n) + " images");
        if (lb.size() < 8 + m) throw FormatError("IDX: label data truncated", lb.size());
        ds.labels.assign(lb.begin() + 8, lb.begin() + 8 + static_cast<std::ptrdiff_t>(m));
    }
    return ds;
}

Dataset ingest_idx(const std::string& images_path, const std::optional<std::string>& labels_path, Binarize mode,
                   std::uint64_t seed) {
    const auto img = read_file(images_path);
    std::optional<std::vector<std::uint8_t>> lab;
    if (labels_path) lab = read_file(*labels_path);
    Dataset ds = lab ? parse_idx(img, std::span<const std::uint8_t>(*lab), mode, seed)
                     : parse_idx(img, std::nullopt, mode, seed);
    ds.source = images_path;
    return ds;
}

std::vector<std::uint8_t> encode_idx_images(std::span<const Observation> images, std::size_t rows, std::size_t cols) {
    std::vector<std::uint8_t> out;
    auto push32 = [&out](std::uint32_t v) {
        for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
    };
    push32(kImageMagic);
    push32(static_cast<std::uint32_t>(images.size()));
    push32(static_cast<std::uint32_t>(rows));
    push32(static_cast<std::uint32_t>(cols));
    for (const auto& img : images) {
        if (img.size() != rows * cols) throw ShapeError("encode_idx_images: image size mismatch");
        for (auto b : img) out.push_back(b ? 255 : 0);
    }
    return out;
}

}  // namespace vrs
