#pragma once

#include <vector>

#include "skymot/tebm.hpp"
#include "skymot/tensor.hpp"

namespace skymot::tdrm {

// Peak locations selected from the previous heatmap, with their embeddings.
struct TopKPicks {
    int k = 0;
    std::vector<int> indices;    // flattened positions into C*H*W, tie-broken ascending
    std::vector<float> scores;   // non-increasing
    Matrix embeddings;           // k x embed_dim, gathered at each pick's (y, x)
};

// 1-D convolution over a channel descriptor, single in/out channel, zero padded.
struct Conv1dParams {
    int kernel = 3;
    std::vector<float> weights;  // length == kernel
    float bias = 0.0f;
};

struct TdrmParams {
    ConvParams reduce;       // 1x1, K -> reduced channel count
    Conv1dParams fc;         // channel gate over the reduced descriptor
    ConvParams fs;           // 7x7, 1 -> 1 spatial gate
    tebm::PsiBlock psi;      // 3x3 (fm+reduced) -> hidden, bn, 1x1 hidden -> classes

    int top_k() const { return reduce.in_channels; }
    int reduced_channels() const { return reduce.out_channels; }
    void validate() const;
};

// NMS-masked top-k peak selection over the flattened heatmap. Scores tie-break
// by ascending flattened index; embeddings gather from id_prev at each pick's
// spatial location.
TopKPicks pick_topk(const FeatureMap& hm_prev, const FeatureMap& id_prev, int k);

// M[j,y,x] = <embeddings[j], id_boosted[:,y,x]>, raw dot products.
FeatureMap correlation(const TopKPicks& picks, const FeatureMap& id_boosted);

// Compress K -> reduced channels, then gate with sigmoid(channel max conv) and
// sigmoid(spatial max conv).
FeatureMap max_csam(const FeatureMap& m, const TdrmParams& params);

// Concatenate [fm_curr, m_hat], apply psi, squash with sigmoid. Entries in (0,1).
FeatureMap refine_heatmap(const FeatureMap& fm_curr, const FeatureMap& m_hat,
                          const TdrmParams& params);

FeatureMap tdrm_forward(const FeatureMap& hm_prev, const FeatureMap& id_prev,
                        const FeatureMap& id_boosted, const FeatureMap& fm_curr, int k,
                        const TdrmParams& params);

}  // namespace skymot::tdrm
