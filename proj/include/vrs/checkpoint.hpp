#pragma once

// Versioned binary checkpoint (host byte order, little-endian on all
// supported targets):
//
//   "VRSCKPT\0"  magic (8 bytes)
//   u32          format version (1)
//   u32 count, u32[count]   architecture (visible width, hidden widths)
//   u64 epoch, u64 step
//   u8           optimizer kind (0 sgd, 1 adam)
//   block theta, block phi:
//       u64 layout hash, u64 n, f64[n] values,
//       u64 optimizer steps, f64[n] first moment, f64[n] second moment
//   f64 gamma, u64 refresh period, u64 quantile samples
//   u64 m, f64[m] thresholds

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vrs/optimizer.hpp"
#include "vrs/param_vector.hpp"

namespace vrs {

struct Checkpoint {
    struct Block {
        std::uint64_t layout_hash = 0;
        std::vector<double> values;
        std::uint64_t optimizer_steps = 0;
        std::vector<double> first;
        std::vector<double> second;
    };

    std::vector<std::uint32_t> architecture;
    std::uint64_t epoch = 0;
    std::uint64_t step = 0;
    OptimizerKind optimizer_kind = OptimizerKind::adam;
    Block theta;
    Block phi;
    double gamma = 0.9;
    std::uint64_t refresh_period = 1;
    std::uint64_t quantile_samples = 1;
    std::vector<double> thresholds;
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);

// Writes to a temporary file next to `path` and renames it into place.
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

Checkpoint::Block make_block(const ParamVector& params, const Optimizer& opt);

// Rebuilds a parameter vector for `layout`; throws ShapeError when the stored
// layout hash or length does not match.
ParamVector restore_params(const Checkpoint::Block& block, const LayoutPtr& layout);
ParamVector restore_first_moment(const Checkpoint::Block& block, const LayoutPtr& layout);
ParamVector restore_second_moment(const Checkpoint::Block& block, const LayoutPtr& layout);

}  // namespace vrs
