#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "skymot/geometry.hpp"

namespace skymot::metrics {

// One ground-truth or predicted box in one frame.
struct AnnotatedBox {
    int frame = 1;      // 1-based
    int id = -1;
    Box box;
    int class_id = 0;
    float conf = 1.0f;
    float visibility = 1.0f;
};

// frame -> boxes, the evaluator's working view of a sequence
using FrameBoxes = std::map<int, std::vector<AnnotatedBox>>;

FrameBoxes group_by_frame(const std::vector<AnnotatedBox>& boxes);

struct EvalOptions {
    double iou_min = 0.5;
    bool class_aware = true;  // single-class mode ignores class ids
};

// Correspondence memory across frames: previous-frame matches drive CLEAR
// continuity, last-known matches drive switch counting.
struct MatchCarry {
    std::map<int, int> prev;  // gt id -> pred id matched in the previous frame
    std::map<int, int> last;  // gt id -> most recent matched pred id
};

struct FrameMatchResult {
    std::vector<std::pair<int, int>> matches;  // indices into the gt/pred vectors
    std::vector<int> false_positives;          // unmatched pred indices
    std::vector<int> misses;                   // unmatched gt indices
    int id_switches = 0;
};

FrameMatchResult frame_match(const std::vector<AnnotatedBox>& gt,
                             const std::vector<AnnotatedBox>& pred,
                             const EvalOptions& opts, MatchCarry& carry);

struct SequenceMetrics {
    std::string name;
    std::optional<double> mota;  // empty when the sequence has no GT boxes
    double idf1 = 0.0, idp = 0.0, idr = 0.0;
    double precision = 0.0, recall = 0.0;
    long long tp = 0, fp = 0, fn = 0, ids = 0;
    long long idtp = 0, idfp = 0, idfn = 0;
    int mt = 0, ml = 0;
    long long total_gt = 0;
    int gt_tracks = 0;
};

struct MetricsReport {
    std::vector<SequenceMetrics> per_sequence;
    SequenceMetrics aggregate;  // counts summed, ratios recomputed
};

// CLEAR event counting plus MOTA/precision/recall/MT/ML for one sequence.
SequenceMetrics clear_mot(const FrameBoxes& gt, const FrameBoxes& pred, const EvalOptions& opts);

struct IdScores {
    double idf1 = 0.0, idp = 0.0, idr = 0.0;
    long long idtp = 0, idfp = 0, idfn = 0;
};

// Identity scores from one global truth-to-prediction assignment maximizing
// per-pair frame overlap.
IdScores id_metrics(const FrameBoxes& gt, const FrameBoxes& pred, const EvalOptions& opts);

// Full per-sequence + aggregate report.
MetricsReport evaluate(const std::vector<std::tuple<std::string, FrameBoxes, FrameBoxes>>& sequences,
                       const EvalOptions& opts);

}  // namespace skymot::metrics
