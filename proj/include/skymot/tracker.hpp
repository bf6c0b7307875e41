#pragma once

#include <map>
#include <vector>

#include "skymot/geometry.hpp"
#include "skymot/kalman.hpp"

namespace skymot::assoc {

// One detector output: box, confidence, class and a unit-norm appearance
// embedding (normalized on ingest).
struct Detection {
    Box box;
    float score = 0.0f;
    int class_id = 0;
    std::vector<float> embedding;

    static Detection make(const Box& box, float score, int class_id,
                          std::vector<float> embedding);
};

enum class TrackStatus { Tentative, Active, Lost };

struct Track {
    int track_id = 0;
    KalmanState kstate;
    std::vector<float> embedding;   // EMA-smoothed, unit norm
    int class_id = 0;
    TrackStatus status = TrackStatus::Tentative;
    int frames_since_update = 0;
    int hits = 0;
    float last_score = 0.0f;
};

struct TrackerConfig {
    float tau = 0.4f;                          // high/low confidence split
    int max_lost = 30;                         // retention, frames
    double gate = kChi2Gate95_4dof;            // squared-Mahalanobis gate
    float appearance_match_threshold = 0.5f;   // stage 1 accept, cosine distance
    float iou_threshold_high = 0.5f;           // stage 2 accept, IOU
    float iou_threshold_low = 0.4f;            // stage 3 accept, IOU
    float ema_alpha = 0.9f;                    // embedding smoothing on match
    float min_score_new = 0.4f;                // floor for initiating tracks
    float maha_blend_weight = 0.0f;            // 0: pure gating, cosine-only cost
    int confirm_hits = 2;                      // consecutive hits before Active
    bool class_aware = true;                   // forbid cross-class matches
};

// 1 - cos(a, b); degenerate norms give distance 1.
double cosine_distance(const std::vector<float>& a, const std::vector<float>& b);

struct StepResult {
    std::vector<std::pair<int, int>> matched;  // (track_id, detection index)
    std::vector<int> new_track_ids;
    std::vector<int> lost_track_ids;           // unmatched but retained
    std::vector<int> removed_track_ids;
};

struct TrackRecord {
    int track_id = 0;
    Box box;
    float score = 0.0f;
    int class_id = 0;
};

// frame number (1-based) -> emitted records
using TrajectorySet = std::map<int, std::vector<TrackRecord>>;

// Single-sequence online tracker. One instance per sequence; not safe for
// concurrent mutation, but distinct instances run independently.
class Tracker {
public:
    explicit Tracker(const TrackerConfig& config) : config_(config) {}

    // Advance one frame: predict all tracks, run the three-stage cascade,
    // update lifecycles.
    StepResult step(const std::vector<Detection>& detections);

    const std::vector<Track>& tracks() const { return tracks_; }
    const TrackerConfig& config() const { return config_; }

private:
    TrackerConfig config_;
    std::vector<Track> tracks_;
    int next_id_ = 1;
};

TrajectorySet run_sequence(const std::vector<std::vector<Detection>>& frames,
                           const TrackerConfig& config);

}  // namespace skymot::assoc
