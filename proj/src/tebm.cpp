#include "skymot/tebm.hpp"

#include <string>

namespace skymot::tebm {

TebmParams TebmParams::identity(int dim) {
    TebmParams p;
    p.cross_linear.weight = Matrix(dim, dim, 0.0f);
    p.cross_linear.bias.assign(dim, 0.0f);
    p.ln_gain.assign(dim, 1.0f);
    p.ln_shift.assign(dim, 0.0f);
    p.psi.conv1 = ConvParams::identity_kxk(dim, 3);
    p.psi.bn = BatchNormParams::identity(dim);
    p.psi.conv2 = ConvParams::identity_kxk(dim, 3);
    return p;
}

void TebmParams::validate() const {
    const int d = dim();
    if (cross_linear.weight.cols != d || static_cast<int>(cross_linear.bias.size()) != d)
        throw DimensionError("TebmParams: cross_linear must be square dim x dim with dim bias");
    if (static_cast<int>(ln_gain.size()) != d || static_cast<int>(ln_shift.size()) != d)
        throw DimensionError("TebmParams: layer norm gain/shift must have length dim");
    if (psi.conv1.in_channels != d || psi.conv1.out_channels != d ||
        psi.conv2.in_channels != d || psi.conv2.out_channels != d)
        throw DimensionError("TebmParams: psi convs must map dim -> dim");
    if (static_cast<int>(psi.bn.scale.size()) != d)
        throw DimensionError("TebmParams: psi batchnorm must have dim channels");
}

std::vector<float> query_pool(const FeatureMap& id_prev) { return global_avg_pool(id_prev); }

FeatureMap salient_attention(const std::vector<float>& query, const FeatureMap& id_curr) {
    return cosine_similarity_map(query, id_curr);
}

std::vector<float> channel_descriptor(const FeatureMap& id_curr, const FeatureMap& w_c,
                                      const TebmParams& params) {
    if (w_c.channels != 1 || w_c.height != id_curr.height || w_c.width != id_curr.width)
        throw DimensionError("channel_descriptor: attention map must be 1 x H x W matching id_curr");
    if (params.dim() != id_curr.channels)
        throw DimensionError("channel_descriptor: params dim " + std::to_string(params.dim()) +
                             " != map channels " + std::to_string(id_curr.channels));

    // v[c] = sum over positions of id_curr[c,y,x] * w_c[y,x]
    const int d = id_curr.channels;
    std::vector<float> v(d);
    for (int c = 0; c < d; ++c) {
        double acc = 0.0;
        for (int y = 0; y < id_curr.height; ++y)
            for (int x = 0; x < id_curr.width; ++x)
                acc += static_cast<double>(id_curr.at(c, y, x)) * w_c.at(0, y, x);
        v[c] = static_cast<float>(acc);
    }

    std::vector<float> u(d);
    for (int r = 0; r < d; ++r) {
        double acc = params.cross_linear.bias[r];
        for (int c = 0; c < d; ++c)
            acc += static_cast<double>(params.cross_linear.weight.at(r, c)) * v[c];
        u[r] = static_cast<float>(acc);
    }
    return layer_norm(u, params.ln_gain, params.ln_shift, params.ln_eps);
}

FeatureMap boost(const FeatureMap& id_curr, const std::vector<float>& w_s, const TebmParams& params) {
    if (static_cast<int>(w_s.size()) != id_curr.channels)
        throw DimensionError("boost: descriptor length != channel count");
    FeatureMap scaled(id_curr.channels, id_curr.height, id_curr.width);
    for (int c = 0; c < id_curr.channels; ++c) {
        const float s = w_s[c] + 1.0f;  // x*w + x == x*(w+1)
        for (int y = 0; y < id_curr.height; ++y)
            for (int x = 0; x < id_curr.width; ++x)
                scaled.at(c, y, x) = id_curr.at(c, y, x) * s;
    }
    return conv2d(relu(batchnorm_inference(conv2d(scaled, params.psi.conv1), params.psi.bn)),
                  params.psi.conv2);
}

FeatureMap tebm_forward(const BoostInputs& inputs, const TebmParams& params) {
    if (!inputs.id_prev.same_shape(inputs.id_curr))
        throw DimensionError("tebm_forward: id_prev and id_curr shapes differ");
    params.validate();
    const std::vector<float> query = query_pool(inputs.id_prev);
    const FeatureMap w_c = salient_attention(query, inputs.id_curr);
    const std::vector<float> w_s = channel_descriptor(inputs.id_curr, w_c, params);
    return boost(inputs.id_curr, w_s, params);
}

}  // namespace skymot::tebm
