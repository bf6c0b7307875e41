#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "skymot/tensor.hpp"

namespace skymot::io {

// Named-tensor container for parameter blobs and dumped intermediates.
// Little-endian layout:
//   magic 'S','T','C','T' | version u16 | count u32
//   entries: name_len u16 | name bytes | ndim u8 | dims u32 x ndim | f32 data
struct NamedTensor {
    std::vector<std::uint32_t> dims;
    std::vector<float> values;

    static NamedTensor from_map(const FeatureMap& m);
    static NamedTensor from_matrix(const Matrix& m);
    static NamedTensor from_vector(const std::vector<float>& v);
    FeatureMap to_map() const;
    Matrix to_matrix() const;
};

using TensorContainer = std::map<std::string, NamedTensor>;

TensorContainer read_tensors(const std::filesystem::path& path);
void write_tensors(const std::filesystem::path& path, const TensorContainer& tensors);

}  // namespace skymot::io
