#pragma once

// Independent double-precision reference implementations used to check the
// library. Deliberately written as plain loops with no shared code paths with
// the implementations under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "skymot/rng.hpp"
#include "skymot/tensor.hpp"

namespace oracle {

using D3 = std::vector<std::vector<std::vector<double>>>;  // [c][y][x]

inline D3 from_map(const skymot::FeatureMap& m) {
    D3 out(m.channels, std::vector<std::vector<double>>(m.height, std::vector<double>(m.width)));
    for (int c = 0; c < m.channels; ++c)
        for (int y = 0; y < m.height; ++y)
            for (int x = 0; x < m.width; ++x)
                out[c][y][x] = m.at(c, y, x);
    return out;
}

inline D3 conv2d(const D3& in, const skymot::ConvParams& p) {
    const int ic = static_cast<int>(in.size());
    const int h = static_cast<int>(in[0].size());
    const int w = static_cast<int>(in[0][0].size());
    D3 out(p.out_channels, std::vector<std::vector<double>>(h, std::vector<double>(w, 0.0)));
    for (int o = 0; o < p.out_channels; ++o)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double s = p.bias[o];
                for (int i = 0; i < ic; ++i)
                    for (int ky = 0; ky < p.kernel_h; ++ky)
                        for (int kx = 0; kx < p.kernel_w; ++kx) {
                            const int yy = y + ky - p.kernel_h / 2;
                            const int xx = x + kx - p.kernel_w / 2;
                            if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
                            s += static_cast<double>(p.wt(o, i, ky, kx)) * in[i][yy][xx];
                        }
                out[o][y][x] = s;
            }
    return out;
}

inline std::vector<double> gap(const D3& in) {
    std::vector<double> out(in.size(), 0.0);
    for (std::size_t c = 0; c < in.size(); ++c) {
        double s = 0.0;
        std::size_t n = 0;
        for (const auto& row : in[c])
            for (double v : row) {
                s += v;
                ++n;
            }
        out[c] = s / static_cast<double>(n);
    }
    return out;
}

inline D3 maxpool3(const D3& in) {
    const int ch = static_cast<int>(in.size());
    const int h = static_cast<int>(in[0].size());
    const int w = static_cast<int>(in[0][0].size());
    D3 out = in;
    for (int c = 0; c < ch; ++c)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double m = -1e300;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int yy = y + dy, xx = x + dx;
                        if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
                        m = std::max(m, in[c][yy][xx]);
                    }
                out[c][y][x] = m;
            }
    return out;
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (std::sqrt(na) < 1e-12 || std::sqrt(nb) < 1e-12) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

inline std::vector<double> layer_norm(const std::vector<double>& x, const std::vector<double>& gain,
                                      const std::vector<double>& shift, double eps) {
    const std::size_t n = x.size();
    double mean = 0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double var = 0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = (x[i] - mean) / std::sqrt(var + eps) * gain[i] + shift[i];
    return out;
}

inline std::vector<std::vector<double>> matmul(const std::vector<std::vector<double>>& a,
                                               const std::vector<std::vector<double>>& b) {
    const std::size_t n = a.size(), k = b.size(), m = b[0].size();
    std::vector<std::vector<double>> out(n, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t t = 0; t < k; ++t)
                out[i][j] += a[i][t] * b[t][j];
    return out;
}

inline D3 bn_relu(const D3& in, const skymot::BatchNormParams& bn, bool apply_relu) {
    D3 out = in;
    for (std::size_t c = 0; c < in.size(); ++c) {
        const double inv = 1.0 / std::sqrt(static_cast<double>(bn.var[c]) + bn.eps);
        for (auto& row : out[c])
            for (double& v : row) {
                v = (v - bn.mean[c]) * inv * bn.scale[c] + bn.shift[c];
                if (apply_relu) v = std::max(v, 0.0);
            }
    }
    return out;
}

inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// Regularized lower incomplete gamma P(2, y) has the closed form
// 1 - e^{-y}(1 + y); the chi-square CDF at 4 dof is P(2, x/2). The 0.95
// quantile follows by bisection.
inline double chi2_quantile_4dof(double prob) {
    const auto cdf = [](double x) {
        const double y = x / 2.0;
        return 1.0 - std::exp(-y) * (1.0 + y);
    };
    double lo = 0.0, hi = 100.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (cdf(mid) < prob ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline skymot::FeatureMap random_map(int c, int h, int w, skymot::Rng& rng, double scale = 1.0) {
    skymot::FeatureMap m(c, h, w);
    for (float& v : m.values) v = static_cast<float>(rng.normal() * scale);
    return m;
}

inline bool close(double a, double b, double rtol) {
    return std::abs(a - b) <= rtol * (1.0 + std::abs(b));
}

}  // namespace oracle
