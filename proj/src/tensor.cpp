#include "skymot/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace skymot {

FeatureMap::FeatureMap(int c, int h, int w, float fill)
    : channels(c), height(h), width(w) {
    if (c <= 0 || h <= 0 || w <= 0)
        throw DimensionError("FeatureMap: non-positive shape " + std::to_string(c) + "x" +
                             std::to_string(h) + "x" + std::to_string(w));
    values.assign(static_cast<std::size_t>(c) * h * w, fill);
}

void FeatureMap::validate(const char* what) const {
    if (channels <= 0 || height <= 0 || width <= 0 ||
        values.size() != static_cast<std::size_t>(channels) * height * width)
        throw DimensionError(std::string(what) + ": value buffer does not match declared shape");
    for (float v : values)
        if (!std::isfinite(v))
            throw DimensionError(std::string(what) + ": non-finite entry");
}

Matrix::Matrix(int r, int c, float fill) : rows(r), cols(c) {
    if (r <= 0 || c <= 0)
        throw DimensionError("Matrix: non-positive shape");
    values.assign(static_cast<std::size_t>(r) * c, fill);
}

Matrix Matrix::identity(int n) {
    Matrix m(n, n, 0.0f);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0f;
    return m;
}

ConvParams::ConvParams(int out, int in, int kh, int kw)
    : out_channels(out), in_channels(in), kernel_h(kh), kernel_w(kw) {
    if (out <= 0 || in <= 0 || kh <= 0 || kw <= 0)
        throw DimensionError("ConvParams: non-positive dims");
    weights.assign(static_cast<std::size_t>(out) * in * kh * kw, 0.0f);
    bias.assign(out, 0.0f);
}

ConvParams ConvParams::identity(int ch) { return identity_kxk(ch, 1); }

ConvParams ConvParams::identity_kxk(int ch, int k) {
    ConvParams p(ch, ch, k, k);
    for (int c = 0; c < ch; ++c) p.wt(c, c, k / 2, k / 2) = 1.0f;
    return p;
}

BatchNormParams BatchNormParams::identity(int ch) {
    BatchNormParams bn;
    bn.scale.assign(ch, 1.0f);
    bn.shift.assign(ch, 0.0f);
    bn.mean.assign(ch, 0.0f);
    bn.var.assign(ch, 1.0f);
    return bn;
}

FeatureMap conv2d(const FeatureMap& input, const ConvParams& params) {
    if (params.in_channels != input.channels)
        throw DimensionError("conv2d: expected " + std::to_string(params.in_channels) +
                             " input channels, got " + std::to_string(input.channels));
    if (params.kernel_h % 2 == 0 || params.kernel_w % 2 == 0)
        throw ConfigError("conv2d: even kernel sizes are unsupported (same padding needs odd kernels)");
    if (params.weights.size() != static_cast<std::size_t>(params.out_channels) * params.in_channels *
                                     params.kernel_h * params.kernel_w ||
        params.bias.size() != static_cast<std::size_t>(params.out_channels))
        throw DimensionError("conv2d: weight/bias buffers do not match declared dims");

    const int H = input.height, W = input.width;
    const int ry = params.kernel_h / 2, rx = params.kernel_w / 2;
    FeatureMap out(params.out_channels, H, W);
    for (int o = 0; o < params.out_channels; ++o) {
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                double acc = params.bias[o];
                for (int i = 0; i < params.in_channels; ++i) {
                    for (int ky = 0; ky < params.kernel_h; ++ky) {
                        const int iy = y + ky - ry;
                        if (iy < 0 || iy >= H) continue;
                        for (int kx = 0; kx < params.kernel_w; ++kx) {
                            const int ix = x + kx - rx;
                            if (ix < 0 || ix >= W) continue;
                            acc += static_cast<double>(params.wt(o, i, ky, kx)) * input.at(i, iy, ix);
                        }
                    }
                }
                out.at(o, y, x) = static_cast<float>(acc);
            }
        }
    }
    return out;
}

std::vector<float> global_avg_pool(const FeatureMap& input) {
    std::vector<float> out(input.channels);
    const double inv = 1.0 / input.plane();
    for (int c = 0; c < input.channels; ++c) {
        double acc = 0.0;
        for (int y = 0; y < input.height; ++y)
            for (int x = 0; x < input.width; ++x)
                acc += input.at(c, y, x);
        out[c] = static_cast<float>(acc * inv);
    }
    return out;
}

FeatureMap max_pool_3x3_same(const FeatureMap& input) {
    FeatureMap out(input.channels, input.height, input.width);
    for (int c = 0; c < input.channels; ++c) {
        for (int y = 0; y < input.height; ++y) {
            const int y0 = std::max(0, y - 1), y1 = std::min(input.height - 1, y + 1);
            for (int x = 0; x < input.width; ++x) {
                const int x0 = std::max(0, x - 1), x1 = std::min(input.width - 1, x + 1);
                float m = input.at(c, y0, x0);
                for (int iy = y0; iy <= y1; ++iy)
                    for (int ix = x0; ix <= x1; ++ix)
                        m = std::max(m, input.at(c, iy, ix));
                out.at(c, y, x) = m;
            }
        }
    }
    return out;
}

FeatureMap cosine_similarity_map(const std::vector<float>& query, const FeatureMap& keys) {
    if (static_cast<int>(query.size()) != keys.channels)
        throw DimensionError("cosine_similarity_map: query dim " + std::to_string(query.size()) +
                             " != key channels " + std::to_string(keys.channels));
    constexpr double kNormFloor = 1e-12;
    double qq = 0.0;
    for (float v : query) qq += static_cast<double>(v) * v;
    const double qn = std::sqrt(qq);

    FeatureMap out(1, keys.height, keys.width);
    for (int y = 0; y < keys.height; ++y) {
        for (int x = 0; x < keys.width; ++x) {
            double dot = 0.0, kk = 0.0;
            for (int c = 0; c < keys.channels; ++c) {
                const double k = keys.at(c, y, x);
                dot += static_cast<double>(query[c]) * k;
                kk += k * k;
            }
            const double kn = std::sqrt(kk);
            out.at(0, y, x) = (qn < kNormFloor || kn < kNormFloor)
                                  ? 0.0f
                                  : static_cast<float>(dot / (qn * kn));
        }
    }
    return out;
}

std::vector<float> layer_norm(const std::vector<float>& x, const std::vector<float>& gain,
                              const std::vector<float>& shift, float eps) {
    if (x.size() != gain.size() || x.size() != shift.size())
        throw DimensionError("layer_norm: x/gain/shift dims disagree");
    const std::size_t n = x.size();
    double mean = 0.0;
    for (float v : x) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (float v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    const double inv = 1.0 / std::sqrt(var + eps);

    std::vector<float> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = static_cast<float>((x[i] - mean) * inv * gain[i] + shift[i]);
    return out;
}

FeatureMap relu(const FeatureMap& x) {
    FeatureMap out = x;
    for (float& v : out.values) v = std::max(v, 0.0f);
    return out;
}

FeatureMap sigmoid_map(const FeatureMap& x) {
    FeatureMap out = x;
    for (float& v : out.values) v = sigmoid_scalar(v);
    return out;
}

FeatureMap batchnorm_inference(const FeatureMap& x, const BatchNormParams& bn) {
    const std::size_t ch = static_cast<std::size_t>(x.channels);
    if (bn.scale.size() != ch || bn.shift.size() != ch || bn.mean.size() != ch || bn.var.size() != ch)
        throw DimensionError("batchnorm_inference: parameter vectors must have one entry per channel");
    FeatureMap out(x.channels, x.height, x.width);
    for (int c = 0; c < x.channels; ++c) {
        const double inv = 1.0 / std::sqrt(static_cast<double>(bn.var[c]) + bn.eps);
        for (int y = 0; y < x.height; ++y)
            for (int xx = 0; xx < x.width; ++xx)
                out.at(c, y, xx) = static_cast<float>((x.at(c, y, xx) - bn.mean[c]) * inv * bn.scale[c] +
                                                      bn.shift[c]);
    }
    return out;
}

Matrix matmul_rows(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows)
        throw DimensionError("matmul_rows: inner dims " + std::to_string(a.cols) + " vs " +
                             std::to_string(b.rows));
    Matrix out(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        for (int j = 0; j < b.cols; ++j) {
            double acc = 0.0;
            for (int k = 0; k < a.cols; ++k)
                acc += static_cast<double>(a.at(i, k)) * b.at(k, j);
            out.at(i, j) = static_cast<float>(acc);
        }
    }
    return out;
}

}  // namespace skymot
