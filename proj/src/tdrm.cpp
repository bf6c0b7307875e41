#include "skymot/tdrm.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace skymot::tdrm {

void TdrmParams::validate() const {
    if (reduce.kernel_h != 1 || reduce.kernel_w != 1)
        throw ConfigError("TdrmParams: reduce must be a 1x1 conv");
    if (static_cast<int>(fc.weights.size()) != fc.kernel || fc.kernel % 2 == 0)
        throw ConfigError("TdrmParams: fc needs an odd kernel with matching weights");
    if (fs.in_channels != 1 || fs.out_channels != 1)
        throw DimensionError("TdrmParams: fs must map 1 -> 1 channel");
    if (psi.conv1.in_channels <= reduced_channels())
        throw DimensionError("TdrmParams: psi input must cover feature + reduced channels");
}

TopKPicks pick_topk(const FeatureMap& hm_prev, const FeatureMap& id_prev, int k) {
    const int n = hm_prev.channels * hm_prev.plane();
    if (k < 1 || k > n)
        throw ArgumentError("pick_topk: k=" + std::to_string(k) + " out of range [1, " +
                            std::to_string(n) + "]");
    if (id_prev.height != hm_prev.height || id_prev.width != hm_prev.width)
        throw DimensionError("pick_topk: heatmap and embedding map spatial dims differ");

    // Keep only cells that equal their clipped 3x3 window max.
    const FeatureMap pooled = max_pool_3x3_same(hm_prev);
    std::vector<float> masked(n);
    for (int i = 0; i < n; ++i)
        masked[i] = (hm_prev.values[i] == pooled.values[i]) ? hm_prev.values[i] : 0.0f;

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](int a, int b) {
        if (masked[a] != masked[b]) return masked[a] > masked[b];
        return a < b;
    });

    TopKPicks picks;
    picks.k = k;
    picks.indices.assign(order.begin(), order.begin() + k);
    picks.scores.resize(k);
    picks.embeddings = Matrix(k, id_prev.channels);
    const int plane = hm_prev.plane();
    for (int i = 0; i < k; ++i) {
        const int idx = picks.indices[i];
        picks.scores[i] = masked[idx];
        const int y = (idx % plane) / hm_prev.width;
        const int x = idx % hm_prev.width;
        for (int c = 0; c < id_prev.channels; ++c)
            picks.embeddings.at(i, c) = id_prev.at(c, y, x);
    }
    return picks;
}

FeatureMap correlation(const TopKPicks& picks, const FeatureMap& id_boosted) {
    if (picks.embeddings.cols != id_boosted.channels)
        throw DimensionError("correlation: embedding dim " + std::to_string(picks.embeddings.cols) +
                             " != map channels " + std::to_string(id_boosted.channels));
    Matrix keys(id_boosted.channels, id_boosted.plane());
    keys.values = id_boosted.values;  // already channels x (H*W) row-major
    const Matrix prod = matmul_rows(picks.embeddings, keys);
    FeatureMap out(picks.k, id_boosted.height, id_boosted.width);
    out.values = prod.values;
    return out;
}

namespace {

std::vector<float> conv1d_same(const std::vector<float>& x, const Conv1dParams& p) {
    const int n = static_cast<int>(x.size());
    const int r = p.kernel / 2;
    std::vector<float> out(n);
    for (int i = 0; i < n; ++i) {
        double acc = p.bias;
        for (int j = 0; j < p.kernel; ++j) {
            const int idx = i + j - r;
            if (idx < 0 || idx >= n) continue;
            acc += static_cast<double>(p.weights[j]) * x[idx];
        }
        out[i] = static_cast<float>(acc);
    }
    return out;
}

}  // namespace

FeatureMap max_csam(const FeatureMap& m, const TdrmParams& params) {
    if (m.channels != params.reduce.in_channels)
        throw DimensionError("max_csam: correlation map has " + std::to_string(m.channels) +
                             " channels, reduce expects " + std::to_string(params.reduce.in_channels));
    const FeatureMap m_r = conv2d(m, params.reduce);
    const int rc = m_r.channels;

    // Channel descriptor: spatial max per channel.
    std::vector<float> ch_max(rc);
    for (int c = 0; c < rc; ++c) {
        float mx = m_r.at(c, 0, 0);
        for (int y = 0; y < m_r.height; ++y)
            for (int x = 0; x < m_r.width; ++x)
                mx = std::max(mx, m_r.at(c, y, x));
        ch_max[c] = mx;
    }
    std::vector<float> ch_gate = conv1d_same(ch_max, params.fc);
    for (float& v : ch_gate) v = sigmoid_scalar(v);

    // Spatial descriptor: channel max per position.
    FeatureMap sp_max(1, m_r.height, m_r.width);
    for (int y = 0; y < m_r.height; ++y) {
        for (int x = 0; x < m_r.width; ++x) {
            float mx = m_r.at(0, y, x);
            for (int c = 1; c < rc; ++c) mx = std::max(mx, m_r.at(c, y, x));
            sp_max.at(0, y, x) = mx;
        }
    }
    const FeatureMap sp_gate = sigmoid_map(conv2d(sp_max, params.fs));

    FeatureMap out(rc, m_r.height, m_r.width);
    for (int c = 0; c < rc; ++c)
        for (int y = 0; y < m_r.height; ++y)
            for (int x = 0; x < m_r.width; ++x)
                out.at(c, y, x) = ch_gate[c] * sp_gate.at(0, y, x) * m_r.at(c, y, x);
    return out;
}

FeatureMap refine_heatmap(const FeatureMap& fm_curr, const FeatureMap& m_hat,
                          const TdrmParams& params) {
    if (fm_curr.height != m_hat.height || fm_curr.width != m_hat.width)
        throw DimensionError("refine_heatmap: spatial dims of feature map and similarity map differ");
    if (params.psi.conv1.in_channels != fm_curr.channels + m_hat.channels)
        throw DimensionError("refine_heatmap: psi expects " +
                             std::to_string(params.psi.conv1.in_channels) + " channels, concat has " +
                             std::to_string(fm_curr.channels + m_hat.channels));

    FeatureMap cat(fm_curr.channels + m_hat.channels, fm_curr.height, fm_curr.width);
    std::copy(fm_curr.values.begin(), fm_curr.values.end(), cat.values.begin());
    std::copy(m_hat.values.begin(), m_hat.values.end(),
              cat.values.begin() + fm_curr.values.size());

    const FeatureMap h =
        conv2d(relu(batchnorm_inference(conv2d(cat, params.psi.conv1), params.psi.bn)),
               params.psi.conv2);
    return sigmoid_map(h);
}

FeatureMap tdrm_forward(const FeatureMap& hm_prev, const FeatureMap& id_prev,
                        const FeatureMap& id_boosted, const FeatureMap& fm_curr, int k,
                        const TdrmParams& params) {
    params.validate();
    const TopKPicks picks = pick_topk(hm_prev, id_prev, k);
    const FeatureMap m = correlation(picks, id_boosted);
    const FeatureMap m_hat = max_csam(m, params);
    return refine_heatmap(fm_curr, m_hat, params);
}

}  // namespace skymot::tdrm
