#include "skymot/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace skymot::losses {

namespace {
constexpr double kClampLo = 1e-6;
constexpr double kClampHi = 1.0 - 1e-6;
}  // namespace

FocalResult focal_heat_loss(const FeatureMap& pred, const HeatTarget& target) {
    if (!pred.same_shape(target.map))
        throw DimensionError("focal_heat_loss: prediction and target shapes differ");

    // Positive cells are exactly the listed peaks; every other cell is a
    // penalty-reduced negative.
    std::vector<char> is_pos(pred.size(), 0);
    for (const auto& [c, y, x] : target.positives) {
        if (c < 0 || c >= pred.channels || y < 0 || y >= pred.height || x < 0 || x >= pred.width)
            throw ArgumentError("focal_heat_loss: positive outside the map");
        is_pos[(static_cast<std::size_t>(c) * pred.height + y) * pred.width + x] = 1;
    }

    const double norm = std::max<std::size_t>(1, target.positives.size());
    FocalResult res;
    res.grad.assign(pred.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double raw = pred.values[i];
        const double p = std::clamp(raw, kClampLo, kClampHi);
        const bool clamped = raw < kClampLo || raw > kClampHi;
        double dldp = 0.0;
        if (is_pos[i]) {
            const double q = 1.0 - p;
            acc += -(q * q) * std::log(p);
            dldp = 2.0 * q * std::log(p) - (q * q) / p;
        } else {
            const double t = target.map.values[i];
            const double w = std::pow(1.0 - t, 4.0);
            acc += -w * p * p * std::log1p(-p);
            dldp = -w * (2.0 * p * std::log1p(-p) - p * p / (1.0 - p));
        }
        res.grad[i] = clamped ? 0.0 : dldp / norm;
    }
    res.loss = acc / norm;
    return res;
}

RegResult l1_reg_loss(const FeatureMap& pred_off, const FeatureMap& pred_wh,
                      const RegTarget& target) {
    if (pred_off.channels != 2 || pred_wh.channels != 2)
        throw DimensionError("l1_reg_loss: regression heads must have 2 channels");
    if (target.offsets.size() != target.centers.size() || target.sizes.size() != target.centers.size())
        throw DimensionError("l1_reg_loss: target arrays disagree with center count");

    RegResult res;
    res.grad_off.assign(pred_off.size(), 0.0);
    res.grad_wh.assign(pred_wh.size(), 0.0);
    if (target.centers.empty()) return res;

    const double norm = 1.0 / (2.0 * target.centers.size());
    double off_acc = 0.0, wh_acc = 0.0;
    for (std::size_t i = 0; i < target.centers.size(); ++i) {
        const auto [y, x] = target.centers[i];
        if (y < 0 || y >= pred_off.height || x < 0 || x >= pred_off.width)
            throw ArgumentError("l1_reg_loss: center (" + std::to_string(y) + "," +
                                std::to_string(x) + ") out of bounds");
        for (int c = 0; c < 2; ++c) {
            const double d_off = static_cast<double>(pred_off.at(c, y, x)) - target.offsets[i][c];
            const double d_wh = static_cast<double>(pred_wh.at(c, y, x)) - target.sizes[i][c];
            off_acc += std::abs(d_off);
            wh_acc += std::abs(d_wh);
            const std::size_t idx = (static_cast<std::size_t>(c) * pred_off.height + y) * pred_off.width + x;
            // subgradient at 0 is 0
            res.grad_off[idx] += (d_off > 0.0 ? 1.0 : (d_off < 0.0 ? -1.0 : 0.0)) * norm;
            res.grad_wh[idx] += (d_wh > 0.0 ? 1.0 : (d_wh < 0.0 ? -1.0 : 0.0)) * norm;
        }
    }
    res.off_loss = off_acc * norm;
    res.wh_loss = wh_acc * norm;
    return res;
}

ReidResult reid_ce_loss(const FeatureMap& id_map, const IdTarget& target) {
    ReidResult res;
    if (target.centers.empty()) return res;

    const int n_classes = target.classifier_w.rows;
    const int dim = target.classifier_w.cols;
    if (n_classes < 2)
        throw ArgumentError("reid_ce_loss: need at least 2 identity classes");
    if (dim != id_map.channels)
        throw DimensionError("reid_ce_loss: classifier dim " + std::to_string(dim) +
                             " != map channels " + std::to_string(id_map.channels));
    if (static_cast<int>(target.classifier_b.size()) != n_classes)
        throw DimensionError("reid_ce_loss: classifier bias length != class count");
    if (target.labels.size() != target.centers.size())
        throw DimensionError("reid_ce_loss: labels/centers disagree");

    const double inv_n = 1.0 / static_cast<double>(target.centers.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < target.centers.size(); ++i) {
        const auto [y, x] = target.centers[i];
        const int label = target.labels[i];
        if (label < 0 || label >= n_classes)
            throw ArgumentError("reid_ce_loss: label out of range");
        if (y < 0 || y >= id_map.height || x < 0 || x >= id_map.width)
            throw ArgumentError("reid_ce_loss: center out of bounds");

        std::vector<double> logits(n_classes);
        for (int r = 0; r < n_classes; ++r) {
            double v = target.classifier_b[r];
            for (int c = 0; c < dim; ++c)
                v += static_cast<double>(target.classifier_w.at(r, c)) * id_map.at(c, y, x);
            logits[r] = v;
        }
        const double mx = *std::max_element(logits.begin(), logits.end());
        double z = 0.0;
        for (double& v : logits) {
            v = std::exp(v - mx);
            z += v;
        }
        acc += -std::log(logits[label] / z);

        // d loss / d embedding = W^T (softmax - onehot) / n
        std::vector<double> g(dim, 0.0);
        for (int r = 0; r < n_classes; ++r) {
            const double coeff = (logits[r] / z - (r == label ? 1.0 : 0.0)) * inv_n;
            for (int c = 0; c < dim; ++c)
                g[c] += coeff * target.classifier_w.at(r, c);
        }
        res.grad_embeddings.push_back(std::move(g));
    }
    res.loss = acc * inv_n;
    return res;
}

TotalResult total_loss(const DetLosses& det, const ReidLosses& reid, const LossState& state) {
    TotalResult res;
    const double e1 = std::exp(-state.beta1);
    const double e2 = std::exp(-state.beta2);
    res.loss = 0.5 * (e1 * det.sum() + e2 * reid.sum()) + state.beta1 + state.beta2;
    res.dbeta1 = -0.5 * e1 * det.sum() + 1.0;
    res.dbeta2 = -0.5 * e2 * reid.sum() + 1.0;
    return res;
}

}  // namespace skymot::losses
