#pragma once

#include <cstdint>

#include "skymot/tdrm.hpp"
#include "skymot/tebm.hpp"

namespace skymot {

// Deterministic pseudo-random parameter sets, used by the module self-test
// and bench commands (and by randomized tests). Weights are scaled by fan-in
// so stacked blocks keep activations at unit order.
tebm::TebmParams random_tebm_params(int dim, std::uint64_t seed);
tdrm::TdrmParams random_tdrm_params(int k, int reduced, int fm_channels, int classes,
                                    std::uint64_t seed, int hidden = 32);

// Nonnegative-psi variant: every conv weight >= 0 and batchnorm is identity,
// which makes the refined heatmap monotone in the similarity-map input.
tdrm::TdrmParams nonneg_tdrm_params(int k, int reduced, int fm_channels, int classes,
                                    std::uint64_t seed, int hidden = 32);

ConvParams random_conv(int out, int in, int kh, int kw, std::uint64_t seed);
BatchNormParams random_bn(int ch, std::uint64_t seed);

}  // namespace skymot
