#include "skymot/param_factory.hpp"

#include <cmath>

#include "skymot/rng.hpp"

namespace skymot {

ConvParams random_conv(int out, int in, int kh, int kw, std::uint64_t seed) {
    Rng rng(seed);
    ConvParams c(out, in, kh, kw);
    const double scale = 1.0 / std::sqrt(static_cast<double>(in) * kh * kw);
    for (float& w : c.weights) w = static_cast<float>(rng.normal() * scale);
    for (float& b : c.bias) b = static_cast<float>(rng.normal() * 0.1);
    return c;
}

BatchNormParams random_bn(int ch, std::uint64_t seed) {
    Rng rng(seed);
    BatchNormParams bn;
    bn.scale.resize(ch);
    bn.shift.resize(ch);
    bn.mean.resize(ch);
    bn.var.resize(ch);
    for (int i = 0; i < ch; ++i) {
        bn.scale[i] = static_cast<float>(rng.uniform(0.5, 1.5));
        bn.shift[i] = static_cast<float>(rng.normal() * 0.1);
        bn.mean[i] = static_cast<float>(rng.normal() * 0.1);
        bn.var[i] = static_cast<float>(rng.uniform(0.5, 1.5));
    }
    return bn;
}

tebm::TebmParams random_tebm_params(int dim, std::uint64_t seed) {
    tebm::TebmParams p;
    Rng rng(seed);
    p.cross_linear.weight = Matrix(dim, dim);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    for (float& w : p.cross_linear.weight.values) w = static_cast<float>(rng.normal() * scale);
    p.cross_linear.bias.resize(dim);
    for (float& b : p.cross_linear.bias) b = static_cast<float>(rng.normal() * 0.1);
    p.ln_gain.resize(dim);
    p.ln_shift.resize(dim);
    for (int i = 0; i < dim; ++i) {
        p.ln_gain[i] = static_cast<float>(rng.uniform(0.5, 1.5));
        p.ln_shift[i] = static_cast<float>(rng.normal() * 0.1);
    }
    p.psi.conv1 = random_conv(dim, dim, 3, 3, rng.next_u64());
    p.psi.bn = random_bn(dim, rng.next_u64());
    p.psi.conv2 = random_conv(dim, dim, 3, 3, rng.next_u64());
    return p;
}

tdrm::TdrmParams random_tdrm_params(int k, int reduced, int fm_channels, int classes,
                                    std::uint64_t seed, int hidden) {
    tdrm::TdrmParams p;
    Rng rng(seed);
    p.reduce = random_conv(reduced, k, 1, 1, rng.next_u64());
    p.fc.kernel = 3;
    p.fc.weights.resize(3);
    for (float& w : p.fc.weights) w = static_cast<float>(rng.normal() * 0.5);
    p.fc.bias = static_cast<float>(rng.normal() * 0.1);
    p.fs = random_conv(1, 1, 7, 7, rng.next_u64());
    p.psi.conv1 = random_conv(hidden, fm_channels + reduced, 3, 3, rng.next_u64());
    p.psi.bn = random_bn(hidden, rng.next_u64());
    p.psi.conv2 = random_conv(classes, hidden, 1, 1, rng.next_u64());
    return p;
}

tdrm::TdrmParams nonneg_tdrm_params(int k, int reduced, int fm_channels, int classes,
                                    std::uint64_t seed, int hidden) {
    tdrm::TdrmParams p = random_tdrm_params(k, reduced, fm_channels, classes, seed, hidden);
    for (float& w : p.psi.conv1.weights) w = std::abs(w);
    for (float& w : p.psi.conv2.weights) w = std::abs(w);
    p.psi.bn = BatchNormParams::identity(hidden);
    return p;
}

}  // namespace skymot
