#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "skymot/losses.hpp"
#include "skymot/metrics.hpp"
#include "skymot/rng.hpp"
#include "skymot/tensor.hpp"
#include "skymot/tracker.hpp"

namespace skymot::synth {

// Scene generation knobs; stands in for recorded aerial sequences.
struct SceneConfig {
    int num_targets = 20;
    int num_frames = 200;
    int image_w = 960;
    int image_h = 540;
    double speed_min = 0.5;        // pixels/frame
    double speed_max = 3.0;
    double ego_amplitude = 0.0;    // global per-frame translation bound
    double birth_rate = 0.0;       // per-frame probabilities
    double death_rate = 0.0;
    double box_min = 16.0;         // box side range, pixels
    double box_max = 40.0;
    std::uint64_t seed = 1;
};

struct CorruptionConfig {
    double miss_rate = 0.0;
    double fp_rate = 0.0;            // per-frame probability of an injected box
    double center_noise_sigma = 0.0; // pixels
    double embed_noise_sigma = 0.0;
    double score_true_mean = 0.9;
    double score_fp_mean = 0.5;
    std::uint64_t seed = 1;
};

// Feature-map geometry for rendered tensors.
struct MapLayout {
    int classes = 2;
    int height = 16;
    int width = 24;
    int stride = 4;
    int embed_dim = 16;
    int fm_channels = 64;
};

// frame (1-based) -> boxes with persistent ids
using GroundTruth = std::map<int, std::vector<metrics::AnnotatedBox>>;

// Constant-velocity targets bouncing off the image border under a shared
// per-frame ego translation. Deterministic in the seed.
GroundTruth generate_scene(const SceneConfig& config);

// Deterministic unit-norm appearance prototype for an id.
std::vector<float> id_prototype(int id, int dim);
std::map<int, std::vector<float>> make_prototypes(const GroundTruth& gt, int dim);

// Drop, jitter and contaminate the ground truth into detector output.
std::map<int, std::vector<assoc::Detection>> corrupt(
    const GroundTruth& gt, const CorruptionConfig& config,
    const std::map<int, std::vector<float>>& prototypes);

struct RenderedMaps {
    FeatureMap fm;       // fm_channels x H x W pseudo-random smooth field
    FeatureMap hm;       // classes x H x W Gaussian-splat target
    FeatureMap idmap;    // embed_dim x H x W prototypes at the center cells
    losses::RegTarget reg;
    losses::IdTarget idt;
};

// CenterNet-style training targets for one frame.
RenderedMaps render_maps(const std::vector<metrics::AnnotatedBox>& gt_frame,
                         const MapLayout& layout);

// Radius such that a splat of that size keeps IOU >= min_overlap with the box.
double gaussian_radius(double height, double width, double min_overlap = 0.7);

// Adjacent-pair sampling: delta uniform in {1..max_interval}.
std::pair<int, int> sample_training_pair(const GroundTruth& gt, int max_interval, Rng& rng);

}  // namespace skymot::synth
