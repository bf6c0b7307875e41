#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "skymot/errors.hpp"

namespace skymot {

// Dense rank-3 tensor, channels x height x width, row-major (c, y, x).
// Carrier for feature maps, heatmaps and embedding maps. Values are float32;
// every operation below accumulates in double before rounding back.
struct FeatureMap {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<float> values;

    FeatureMap() = default;
    FeatureMap(int c, int h, int w, float fill = 0.0f);

    float& at(int c, int y, int x) { return values[(static_cast<std::size_t>(c) * height + y) * width + x]; }
    float at(int c, int y, int x) const { return values[(static_cast<std::size_t>(c) * height + y) * width + x]; }

    int plane() const { return height * width; }
    std::size_t size() const { return values.size(); }
    bool same_shape(const FeatureMap& o) const {
        return channels == o.channels && height == o.height && width == o.width;
    }
    // Throws DimensionError if the value buffer disagrees with the declared shape
    // or any entry is non-finite.
    void validate(const char* what = "feature map") const;
};

// Row-major dense matrix of float32.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<float> values;

    Matrix() = default;
    Matrix(int r, int c, float fill = 0.0f);
    static Matrix identity(int n);

    float& at(int r, int c) { return values[static_cast<std::size_t>(r) * cols + c]; }
    float at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
};

// 2-D convolution weights, layout [out][in][ky][kx], plus one bias per output channel.
struct ConvParams {
    int out_channels = 0;
    int in_channels = 0;
    int kernel_h = 0;
    int kernel_w = 0;
    std::vector<float> weights;
    std::vector<float> bias;

    ConvParams() = default;
    ConvParams(int out, int in, int kh, int kw);
    // 1x1 kernel mapping each channel to itself; out == in.
    static ConvParams identity(int ch);
    // Odd square kernel with 1 at the center tap of the matching channel.
    static ConvParams identity_kxk(int ch, int k);

    float wt(int o, int i, int ky, int kx) const {
        return weights[((static_cast<std::size_t>(o) * in_channels + i) * kernel_h + ky) * kernel_w + kx];
    }
    float& wt(int o, int i, int ky, int kx) {
        return weights[((static_cast<std::size_t>(o) * in_channels + i) * kernel_h + ky) * kernel_w + kx];
    }
};

// Inference-form batch normalization, one scalar per channel.
struct BatchNormParams {
    std::vector<float> scale;
    std::vector<float> shift;
    std::vector<float> mean;
    std::vector<float> var;
    float eps = 1e-5f;

    static BatchNormParams identity(int ch);
};

// Cross-correlation (no kernel flip), stride 1, "same" zero padding.
// Requires odd kernel sizes and params.in_channels == input.channels.
FeatureMap conv2d(const FeatureMap& input, const ConvParams& params);

// Per-channel mean over all spatial positions.
std::vector<float> global_avg_pool(const FeatureMap& input);

// 3x3 max pooling, stride 1, same shape; the window is clipped at the borders
// so padded cells never participate in the max.
FeatureMap max_pool_3x3_same(const FeatureMap& input);

// 1 x H x W map of cos(query, keys[:,y,x]). Positions where either norm
// falls below 1e-12 yield 0.
FeatureMap cosine_similarity_map(const std::vector<float>& query, const FeatureMap& keys);

// (x - mean)/sqrt(var + eps) * gain + shift, population variance over the vector.
std::vector<float> layer_norm(const std::vector<float>& x, const std::vector<float>& gain,
                              const std::vector<float>& shift, float eps);

FeatureMap relu(const FeatureMap& x);
FeatureMap sigmoid_map(const FeatureMap& x);
FeatureMap batchnorm_inference(const FeatureMap& x, const BatchNormParams& bn);

// Exact dense product, K x D times D x M.
Matrix matmul_rows(const Matrix& a, const Matrix& b);

inline float sigmoid_scalar(double v) { return static_cast<float>(1.0 / (1.0 + std::exp(-v))); }

}  // namespace skymot
