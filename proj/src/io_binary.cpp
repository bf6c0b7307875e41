#include <cstring>
#include <fstream>

#include "skymot/errors.hpp"
#include "skymot/io/atomic_file.hpp"
#include "skymot/io/sidecar.hpp"
#include "skymot/io/tensor_container.hpp"

namespace skymot::io {

namespace {

// Explicit little-endian packing keeps the formats bit-exact across hosts.
void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

class Reader {
public:
    Reader(const std::filesystem::path& path) : path_(path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open " + path.string());
        data_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }

    std::size_t offset() const { return pos_; }
    std::size_t remaining() const { return data_.size() - pos_; }

    void need(std::size_t n, const char* what) {
        if (remaining() < n)
            throw FormatError(path_.string() + ": truncated " + what + " at byte offset " +
                              std::to_string(pos_));
    }

    std::uint8_t u8(const char* what) {
        need(1, what);
        return static_cast<std::uint8_t>(data_[pos_++]);
    }

    std::uint16_t u16(const char* what) {
        need(2, what);
        const std::uint16_t v = static_cast<std::uint8_t>(data_[pos_]) |
                                (static_cast<std::uint16_t>(static_cast<std::uint8_t>(data_[pos_ + 1])) << 8);
        pos_ += 2;
        return v;
    }

    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(data_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }

    float f32(const char* what) {
        const std::uint32_t bits = u32(what);
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }

    std::string bytes(std::size_t n, const char* what) {
        need(n, what);
        std::string s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::string data_;
    std::size_t pos_ = 0;
};

}  // namespace

EmbeddingSidecar read_embeddings(const std::filesystem::path& path) {
    Reader r(path);
    if (r.bytes(4, "header") != "STCE")
        throw FormatError(path.string() + ": bad magic, not an embedding sidecar");
    EmbeddingSidecar sc;
    sc.version = r.u16("header");
    if (sc.version != 1)
        throw FormatError(path.string() + ": unsupported sidecar version " +
                          std::to_string(sc.version));
    sc.dim = r.u16("header");
    if (sc.dim == 0) throw FormatError(path.string() + ": invalid header, dim must be positive");

    const std::size_t record_size = 8 + 4ull * sc.dim;
    if (r.remaining() % record_size != 0)
        throw FormatError(path.string() + ": truncated record at byte offset " +
                          std::to_string(8 + (r.remaining() / record_size) * record_size));
    while (r.remaining() > 0) {
        EmbeddingRecord rec;
        rec.frame = r.u32("record");
        rec.det_index = r.u32("record");
        rec.values.resize(sc.dim);
        for (float& v : rec.values) v = r.f32("record");
        sc.records.push_back(std::move(rec));
    }
    return sc;
}

void write_embeddings(const std::filesystem::path& path, const EmbeddingSidecar& sidecar) {
    if (sidecar.dim == 0) throw ArgumentError("write_embeddings: dim must be positive");
    std::string out;
    out += "STCE";
    put_u16(out, sidecar.version);
    put_u16(out, sidecar.dim);
    for (const EmbeddingRecord& rec : sidecar.records) {
        if (rec.values.size() != sidecar.dim)
            throw ArgumentError("write_embeddings: record dim mismatch");
        put_u32(out, rec.frame);
        put_u32(out, rec.det_index);
        for (float v : rec.values) put_f32(out, v);
    }
    AtomicFile file(path, /*binary=*/true);
    file.stream().write(out.data(), static_cast<std::streamsize>(out.size()));
    file.commit();
}

NamedTensor NamedTensor::from_map(const FeatureMap& m) {
    NamedTensor t;
    t.dims = {static_cast<std::uint32_t>(m.channels), static_cast<std::uint32_t>(m.height),
              static_cast<std::uint32_t>(m.width)};
    t.values = m.values;
    return t;
}

NamedTensor NamedTensor::from_matrix(const Matrix& m) {
    NamedTensor t;
    t.dims = {static_cast<std::uint32_t>(m.rows), static_cast<std::uint32_t>(m.cols)};
    t.values = m.values;
    return t;
}

NamedTensor NamedTensor::from_vector(const std::vector<float>& v) {
    NamedTensor t;
    t.dims = {static_cast<std::uint32_t>(v.size())};
    t.values = v;
    return t;
}

FeatureMap NamedTensor::to_map() const {
    if (dims.size() != 3) throw FormatError("NamedTensor: expected rank 3");
    FeatureMap m(static_cast<int>(dims[0]), static_cast<int>(dims[1]), static_cast<int>(dims[2]));
    if (values.size() != m.values.size()) throw FormatError("NamedTensor: value count mismatch");
    m.values = values;
    return m;
}

Matrix NamedTensor::to_matrix() const {
    if (dims.size() != 2) throw FormatError("NamedTensor: expected rank 2");
    Matrix m(static_cast<int>(dims[0]), static_cast<int>(dims[1]));
    if (values.size() != m.values.size()) throw FormatError("NamedTensor: value count mismatch");
    m.values = values;
    return m;
}

TensorContainer read_tensors(const std::filesystem::path& path) {
    Reader r(path);
    if (r.bytes(4, "header") != "STCT")
        throw FormatError(path.string() + ": bad magic, not a tensor container");
    const std::uint16_t version = r.u16("header");
    if (version != 1)
        throw FormatError(path.string() + ": unsupported container version " + std::to_string(version));
    const std::uint32_t count = r.u32("header");

    TensorContainer out;
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint16_t name_len = r.u16("entry name");
        const std::string name = r.bytes(name_len, "entry name");
        NamedTensor t;
        const std::uint8_t ndim = r.u8("entry dims");
        std::size_t total = 1;
        for (std::uint8_t d = 0; d < ndim; ++d) {
            t.dims.push_back(r.u32("entry dims"));
            total *= t.dims.back();
        }
        t.values.resize(total);
        for (float& v : t.values) v = r.f32("entry data");
        out[name] = std::move(t);
    }
    if (r.remaining() != 0)
        throw FormatError(path.string() + ": trailing bytes at offset " + std::to_string(r.offset()));
    return out;
}

void write_tensors(const std::filesystem::path& path, const TensorContainer& tensors) {
    std::string out;
    out += "STCT";
    put_u16(out, 1);
    put_u32(out, static_cast<std::uint32_t>(tensors.size()));
    for (const auto& [name, t] : tensors) {
        put_u16(out, static_cast<std::uint16_t>(name.size()));
        out += name;
        out.push_back(static_cast<char>(t.dims.size()));
        std::size_t total = 1;
        for (std::uint32_t d : t.dims) {
            put_u32(out, d);
            total *= d;
        }
        if (t.values.size() != total)
            throw ArgumentError("write_tensors: '" + name + "' value count does not match dims");
        for (float v : t.values) put_f32(out, v);
    }
    AtomicFile file(path, /*binary=*/true);
    file.stream().write(out.data(), static_cast<std::streamsize>(out.size()));
    file.commit();
}

}  // namespace skymot::io
