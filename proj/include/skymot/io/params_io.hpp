#pragma once

#include <filesystem>

#include "skymot/io/tensor_container.hpp"
#include "skymot/tdrm.hpp"
#include "skymot/tebm.hpp"

namespace skymot::io {

TensorContainer tebm_to_tensors(const tebm::TebmParams& params);
tebm::TebmParams tebm_from_tensors(const TensorContainer& tensors);

TensorContainer tdrm_to_tensors(const tdrm::TdrmParams& params);
tdrm::TdrmParams tdrm_from_tensors(const TensorContainer& tensors);

void save_tebm_params(const std::filesystem::path& path, const tebm::TebmParams& params);
tebm::TebmParams load_tebm_params(const std::filesystem::path& path);
void save_tdrm_params(const std::filesystem::path& path, const tdrm::TdrmParams& params);
tdrm::TdrmParams load_tdrm_params(const std::filesystem::path& path);

}  // namespace skymot::io
