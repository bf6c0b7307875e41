#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "skymot/synth.hpp"
#include "skymot/tracker.hpp"

namespace skymot::io {

// Whole-run configuration document (JSON). Every key is optional and falls
// back to the defaults below; unknown keys are rejected with their full path.
struct RunConfig {
    assoc::TrackerConfig tracker;
    synth::SceneConfig scene;
    synth::CorruptionConfig corruption;
    synth::MapLayout layout;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
};

RunConfig parse_run_config(const std::string& text, const std::string& origin = "config");
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace skymot::io
