#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace skymot::io {

// Binary appearance-embedding sidecar. Little-endian layout:
//   magic 'S','T','C','E' | version u16 | dim u16
//   records: frame u32 | det_index u32 | dim x f32
struct EmbeddingRecord {
    std::uint32_t frame = 0;
    std::uint32_t det_index = 0;
    std::vector<float> values;
};

struct EmbeddingSidecar {
    std::uint16_t version = 1;
    std::uint16_t dim = 0;
    std::vector<EmbeddingRecord> records;
};

EmbeddingSidecar read_embeddings(const std::filesystem::path& path);
void write_embeddings(const std::filesystem::path& path, const EmbeddingSidecar& sidecar);

}  // namespace skymot::io
