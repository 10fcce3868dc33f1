#include "vrs/checkpoint.hpp"

#include <array>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>

#include "vrs/errors.hpp"

namespace vrs {

namespace {

constexpr std::array<char, 8> kMagic = {'V', 'R', 'S', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;
// Bounds on untrusted lengths read from disk.
constexpr std::uint64_t kMaxValues = std::uint64_t{1} << 32;

template <typename T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

void put_doubles(std::ostream& out, const std::vector<double>& v) {
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    template <typename T>
    T get(const char* what) {
        T v{};
        read(&v, sizeof(T), what);
        return v;
    }

    std::vector<double> doubles(std::uint64_t n, const char* what) {
        if (n > kMaxValues) throw FormatError(std::string("checkpoint: implausible length for ") + what, offset_);
        std::vector<double> v(n);
        read(v.data(), n * sizeof(double), what);
        return v;
    }

    void read(void* dst, std::size_t bytes, const char* what) {
        in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(bytes));
        if (static_cast<std::size_t>(in_.gcount()) != bytes) {
            throw FormatError(std::string("checkpoint: truncated while reading ") + what,
                              offset_ + static_cast<std::size_t>(in_.gcount()));
        }
        offset_ += bytes;
    }

    std::size_t offset() const { return offset_; }

private:
    std::istream& in_;
    std::size_t offset_ = 0;
};

void write_block(std::ostream& out, const Checkpoint::Block& b) {
    put<std::uint64_t>(out, b.layout_hash);
    put<std::uint64_t>(out, b.values.size());
    put_doubles(out, b.values);
    put<std::uint64_t>(out, b.optimizer_steps);
    put_doubles(out, b.first);
    put_doubles(out, b.second);
}

Checkpoint::Block read_block(Reader& r) {
    Checkpoint::Block b;
    b.layout_hash = r.get<std::uint64_t>("layout hash");
    const auto n = r.get<std::uint64_t>("parameter count");
    b.values = r.doubles(n, "parameters");
    b.optimizer_steps = r.get<std::uint64_t>("optimizer steps");
    b.first = r.doubles(n, "first moment");
    b.second = r.doubles(n, "second moment");
    return b;
}

void check_block(const Checkpoint::Block& block, const LayoutPtr& layout) {
    if (block.layout_hash != layout->hash() || block.values.size() != layout->size()) {
        throw ShapeError("checkpoint: parameter layout does not match the model");
    }
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& c) {
    for (const auto* b : {&c.theta, &c.phi}) {
        if (b->first.size() != b->values.size() || b->second.size() != b->values.size()) {
            throw ShapeError("checkpoint: optimizer moments do not match parameter count");
        }
    }
    out.write(kMagic.data(), kMagic.size());
    put<std::uint32_t>(out, kVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(c.architecture.size()));
    for (auto w : c.architecture) put<std::uint32_t>(out, w);
    put<std::uint64_t>(out, c.epoch);
    put<std::uint64_t>(out, c.step);
    put<std::uint8_t>(out, c.optimizer_kind == OptimizerKind::adam ? 1 : 0);
    write_block(out, c.theta);
    write_block(out, c.phi);
    put<double>(out, c.gamma);
    put<std::uint64_t>(out, c.refresh_period);
    put<std::uint64_t>(out, c.quantile_samples);
    put<std::uint64_t>(out, c.thresholds.size());
    put_doubles(out, c.thresholds);
    if (!out) throw Error("checkpoint: write failed");
}

Checkpoint read_checkpoint(std::istream& in) {
    Reader r(in);
    std::array<char, 8> magic{};
    r.read(magic.data(), magic.size(), "magic");
    if (magic != kMagic) throw FormatError("checkpoint: bad magic header", 0);
    const auto version = r.get<std::uint32_t>("version");
    if (version != kVersion) throw FormatError("checkpoint: unsupported version " + std::to_string(version), 8);

    Checkpoint c;
    const auto arch = r.get<std::uint32_t>("architecture length");
    if (arch > 64) throw FormatError("checkpoint: implausible architecture length", r.offset());
    for (std::uint32_t i = 0; i < arch; ++i) c.architecture.push_back(r.get<std::uint32_t>("architecture"));
    c.epoch = r.get<std::uint64_t>("epoch");
    c.step = r.get<std::uint64_t>("step");
    const auto kind = r.get<std::uint8_t>("optimizer kind");
    if (kind > 1) throw FormatError("checkpoint: unknown optimizer kind", r.offset() - 1);
    c.optimizer_kind = kind == 1 ? OptimizerKind::adam : OptimizerKind::sgd_momentum;
    c.theta = read_block(r);
    c.phi = read_block(r);
    c.gamma = r.get<double>("gamma");
    c.refresh_period = r.get<std::uint64_t>("refresh period");
    c.quantile_samples = r.get<std::uint64_t>("quantile samples");
    const auto m = r.get<std::uint64_t>("threshold count");
    c.thresholds = r.doubles(m, "thresholds");
    return c;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("checkpoint: cannot open " + tmp + " for writing");
        write_checkpoint(out, ckpt);
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("checkpoint: cannot open '" + path + "'");
    return read_checkpoint(in);
}

Checkpoint::Block make_block(const ParamVector& params, const Optimizer& opt) {
    Checkpoint::Block b;
    b.layout_hash = params.layout()->hash();
    b.values.assign(params.values().begin(), params.values().end());
    b.optimizer_steps = opt.step_count();
    b.first.assign(opt.first_moment().values().begin(), opt.first_moment().values().end());
    b.second.assign(opt.second_moment().values().begin(), opt.second_moment().values().end());
    return b;
}

ParamVector restore_params(const Checkpoint::Block& block, const LayoutPtr& layout) {
    check_block(block, layout);
    return ParamVector(layout, block.values);
}

ParamVector restore_first_moment(const Checkpoint::Block& block, const LayoutPtr& layout) {
    check_block(block, layout);
    return ParamVector(layout, block.first);
}

ParamVector restore_second_moment(const Checkpoint::Block& block, const LayoutPtr& layout) {
    check_block(block, layout);
    return ParamVector(layout, block.second);
}

}  // namespace vrs
