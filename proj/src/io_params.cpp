#include "skymot/io/params_io.hpp"

#include <string>

#include "skymot/errors.hpp"

namespace skymot::io {

namespace {

NamedTensor conv_weights(const ConvParams& c) {
    NamedTensor t;
    t.dims = {static_cast<std::uint32_t>(c.out_channels), static_cast<std::uint32_t>(c.in_channels),
              static_cast<std::uint32_t>(c.kernel_h), static_cast<std::uint32_t>(c.kernel_w)};
    t.values = c.weights;
    return t;
}

void put_conv(TensorContainer& out, const std::string& prefix, const ConvParams& c) {
    out[prefix + ".weight"] = conv_weights(c);
    out[prefix + ".bias"] = NamedTensor::from_vector(c.bias);
}

void put_bn(TensorContainer& out, const std::string& prefix, const BatchNormParams& bn) {
    out[prefix + ".scale"] = NamedTensor::from_vector(bn.scale);
    out[prefix + ".shift"] = NamedTensor::from_vector(bn.shift);
    out[prefix + ".mean"] = NamedTensor::from_vector(bn.mean);
    out[prefix + ".var"] = NamedTensor::from_vector(bn.var);
    out[prefix + ".eps"] = NamedTensor::from_vector({bn.eps});
}

const NamedTensor& need(const TensorContainer& tc, const std::string& name) {
    const auto it = tc.find(name);
    if (it == tc.end()) throw FormatError("parameter container: missing tensor '" + name + "'");
    return it->second;
}

ConvParams get_conv(const TensorContainer& tc, const std::string& prefix) {
    const NamedTensor& w = need(tc, prefix + ".weight");
    if (w.dims.size() != 4) throw FormatError("parameter container: '" + prefix + "' is not a conv");
    ConvParams c(static_cast<int>(w.dims[0]), static_cast<int>(w.dims[1]),
                 static_cast<int>(w.dims[2]), static_cast<int>(w.dims[3]));
    c.weights = w.values;
    c.bias = need(tc, prefix + ".bias").values;
    return c;
}

BatchNormParams get_bn(const TensorContainer& tc, const std::string& prefix) {
    BatchNormParams bn;
    bn.scale = need(tc, prefix + ".scale").values;
    bn.shift = need(tc, prefix + ".shift").values;
    bn.mean = need(tc, prefix + ".mean").values;
    bn.var = need(tc, prefix + ".var").values;
    bn.eps = need(tc, prefix + ".eps").values.at(0);
    return bn;
}

}  // namespace

TensorContainer tebm_to_tensors(const tebm::TebmParams& params) {
    TensorContainer out;
    out["cross_linear.weight"] = NamedTensor::from_matrix(params.cross_linear.weight);
    out["cross_linear.bias"] = NamedTensor::from_vector(params.cross_linear.bias);
    out["ln.gain"] = NamedTensor::from_vector(params.ln_gain);
    out["ln.shift"] = NamedTensor::from_vector(params.ln_shift);
    out["ln.eps"] = NamedTensor::from_vector({params.ln_eps});
    put_conv(out, "psi.conv1", params.psi.conv1);
    put_bn(out, "psi.bn", params.psi.bn);
    put_conv(out, "psi.conv2", params.psi.conv2);
    return out;
}

tebm::TebmParams tebm_from_tensors(const TensorContainer& tensors) {
    tebm::TebmParams p;
    p.cross_linear.weight = need(tensors, "cross_linear.weight").to_matrix();
    p.cross_linear.bias = need(tensors, "cross_linear.bias").values;
    p.ln_gain = need(tensors, "ln.gain").values;
    p.ln_shift = need(tensors, "ln.shift").values;
    p.ln_eps = need(tensors, "ln.eps").values.at(0);
    p.psi.conv1 = get_conv(tensors, "psi.conv1");
    p.psi.bn = get_bn(tensors, "psi.bn");
    p.psi.conv2 = get_conv(tensors, "psi.conv2");
    p.validate();
    return p;
}

TensorContainer tdrm_to_tensors(const tdrm::TdrmParams& params) {
    TensorContainer out;
    put_conv(out, "reduce", params.reduce);
    out["fc.weight"] = NamedTensor::from_vector(params.fc.weights);
    out["fc.bias"] = NamedTensor::from_vector({params.fc.bias});
    put_conv(out, "fs", params.fs);
    put_conv(out, "psi.conv1", params.psi.conv1);
    put_bn(out, "psi.bn", params.psi.bn);
    put_conv(out, "psi.conv2", params.psi.conv2);
    return out;
}

tdrm::TdrmParams tdrm_from_tensors(const TensorContainer& tensors) {
    tdrm::TdrmParams p;
    p.reduce = get_conv(tensors, "reduce");
    p.fc.weights = need(tensors, "fc.weight").values;
    p.fc.kernel = static_cast<int>(p.fc.weights.size());
    p.fc.bias = need(tensors, "fc.bias").values.at(0);
    p.fs = get_conv(tensors, "fs");
    p.psi.conv1 = get_conv(tensors, "psi.conv1");
    p.psi.bn = get_bn(tensors, "psi.bn");
    p.psi.conv2 = get_conv(tensors, "psi.conv2");
    p.validate();
    return p;
}

void save_tebm_params(const std::filesystem::path& path, const tebm::TebmParams& params) {
    write_tensors(path, tebm_to_tensors(params));
}

tebm::TebmParams load_tebm_params(const std::filesystem::path& path) {
    return tebm_from_tensors(read_tensors(path));
}

void save_tdrm_params(const std::filesystem::path& path, const tdrm::TdrmParams& params) {
    write_tensors(path, tdrm_to_tensors(params));
}

tdrm::TdrmParams load_tdrm_params(const std::filesystem::path& path) {
    return tdrm_from_tensors(read_tensors(path));
}

}  // namespace skymot::io
