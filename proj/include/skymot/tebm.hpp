#pragma once

#include <vector>

#include "skymot/tensor.hpp"

namespace skymot::tebm {

// Dense map y = W x + b; stands in for a 1x1 convolution applied to a pooled vector.
struct DenseParams {
    Matrix weight;
    std::vector<float> bias;
};

// Conv2d - BatchNorm - ReLU - Conv2d block.
struct PsiBlock {
    ConvParams conv1;
    BatchNormParams bn;
    ConvParams conv2;
};

struct TebmParams {
    DenseParams cross_linear;      // dim -> dim
    std::vector<float> ln_gain;    // dim
    std::vector<float> ln_shift;   // dim
    PsiBlock psi;                  // 3x3 dim->dim, bn(dim), 3x3 dim->dim
    float ln_eps = 1e-5f;

    int dim() const { return cross_linear.weight.rows; }
    // Zero cross-relation and identity psi: the forward pass reduces to the
    // residual path and returns the current map unchanged (for nonnegative input).
    static TebmParams identity(int dim);
    void validate() const;
};

// Previous/current embedding maps; must share shape.
struct BoostInputs {
    FeatureMap id_prev;
    FeatureMap id_curr;
};

// Pooled 1-D query summarizing the previous frame's embedding map.
std::vector<float> query_pool(const FeatureMap& id_prev);

// Per-position cosine between the pooled query and the current embedding columns.
FeatureMap salient_attention(const std::vector<float>& query, const FeatureMap& id_curr);

// Attention-weighted channel sums, passed through the dense map and layer norm.
std::vector<float> channel_descriptor(const FeatureMap& id_curr, const FeatureMap& w_c,
                                      const TebmParams& params);

// psi(id_curr * w_s + id_curr) with per-channel scaling by w_s.
FeatureMap boost(const FeatureMap& id_curr, const std::vector<float>& w_s, const TebmParams& params);

// Full pipeline: pool -> attention -> descriptor -> reweight. Shape-preserving.
FeatureMap tebm_forward(const BoostInputs& inputs, const TebmParams& params);

}  // namespace skymot::tebm
