#pragma once

#include <array>
#include <tuple>
#include <utility>
#include <vector>

#include "skymot/tensor.hpp"

namespace skymot::losses {

// Ground-truth heatmap with the exact 1.0 peaks listed; all other entries in [0, 1).
struct HeatTarget {
    FeatureMap map;
    std::vector<std::tuple<int, int, int>> positives;  // (class, y, x)
};

// Per-center regression targets, feature-map units.
struct RegTarget {
    std::vector<std::pair<int, int>> centers;       // (y, x)
    std::vector<std::array<float, 2>> offsets;
    std::vector<std::array<float, 2>> sizes;        // (w, h)
};

// Identity classification targets plus the dense classifier that maps
// embeddings to per-identity logits.
struct IdTarget {
    std::vector<std::pair<int, int>> centers;  // (y, x)
    std::vector<int> labels;                   // in [0, N)
    Matrix classifier_w;                       // N x embed_dim
    std::vector<float> classifier_b;           // N
};

// Learnable branch-balancing coefficients.
struct LossState {
    double beta1 = 0.0;
    double beta2 = 0.0;
};

struct FocalResult {
    double loss = 0.0;
    std::vector<double> grad;  // d loss / d pred, same layout as pred.values
};

struct RegResult {
    double off_loss = 0.0;
    double wh_loss = 0.0;
    std::vector<double> grad_off;
    std::vector<double> grad_wh;
};

struct ReidResult {
    double loss = 0.0;
    // One gradient row per center, d loss / d gathered embedding.
    std::vector<std::vector<double>> grad_embeddings;
};

struct DetLosses {
    double heat_prev = 0.0;
    double heat_curr = 0.0;
    double off = 0.0;
    double wh = 0.0;
    double sum() const { return heat_prev + heat_curr + off + wh; }
};

struct ReidLosses {
    double prev = 0.0;
    double curr = 0.0;
    double sum() const { return prev + curr; }
};

struct TotalResult {
    double loss = 0.0;
    double dbeta1 = 0.0;
    double dbeta2 = 0.0;
};

// Penalty-reduced focal loss over the heatmap: positives weigh (1-p)^2 log p,
// negatives (1-t)^4 p^2 log(1-p); normalized by max(1, #positives).
// Predictions are clamped into [1e-6, 1-1e-6] before the logs.
FocalResult focal_heat_loss(const FeatureMap& pred, const HeatTarget& target);

// Masked mean absolute error over the listed centers, one mean per head.
RegResult l1_reg_loss(const FeatureMap& pred_off, const FeatureMap& pred_wh,
                      const RegTarget& target);

// Gather one embedding per center, run the dense classifier + softmax, and
// average the cross entropies. Empty centers yield zero loss and no gradients.
ReidResult reid_ce_loss(const FeatureMap& id_map, const IdTarget& target);

// Uncertainty-weighted total:
//   L = 1/2 [ e^{-b1} * sum(det) + e^{-b2} * sum(reid) ] + b1 + b2
TotalResult total_loss(const DetLosses& det, const ReidLosses& reid, const LossState& state);

}  // namespace skymot::losses
