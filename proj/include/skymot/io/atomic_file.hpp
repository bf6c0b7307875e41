#pragma once

#include <filesystem>
#include <fstream>

#include "skymot/errors.hpp"

namespace skymot::io {

// Write-to-temp + rename. The destination appears only after commit(), so an
// error path never leaves a partial file behind.
class AtomicFile {
public:
    explicit AtomicFile(const std::filesystem::path& path, bool binary = false)
        : path_(path), tmp_(path.string() + ".tmp") {
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        stream_.open(tmp_, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
        if (!stream_) throw IoError("cannot open " + tmp_.string() + " for writing");
    }

    ~AtomicFile() {
        if (!committed_) {
            stream_.close();
            std::error_code ec;
            std::filesystem::remove(tmp_, ec);
        }
    }

    std::ofstream& stream() { return stream_; }

    void commit() {
        stream_.flush();
        if (!stream_.good()) throw IoError("write to " + tmp_.string() + " failed");
        stream_.close();
        std::filesystem::rename(tmp_, path_);
        committed_ = true;
    }

private:
    std::filesystem::path path_;
    std::filesystem::path tmp_;
    std::ofstream stream_;
    bool committed_ = false;
};

}  // namespace skymot::io
