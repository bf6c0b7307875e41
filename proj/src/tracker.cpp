#include "skymot/tracker.hpp"

#include <algorithm>
#include <cmath>

#include "skymot/assignment.hpp"
#include "skymot/errors.hpp"

namespace skymot::assoc {

namespace {

void normalize(std::vector<float>& v) {
    double n = 0.0;
    for (float x : v) n += static_cast<double>(x) * x;
    n = std::sqrt(n);
    if (n < 1e-12) return;
    // Already within the unit-norm invariant: leave the values untouched so
    // clean prototypes round-trip bit-exactly.
    if (std::abs(n - 1.0) <= 1e-3) return;
    for (float& x : v) x = static_cast<float>(x / n);
}

}  // namespace

Detection Detection::make(const Box& box, float score, int class_id,
                          std::vector<float> embedding) {
    if (box.width <= 0.0f || box.height <= 0.0f)
        throw ArgumentError("Detection: box sizes must be positive");
    Detection d;
    d.box = box;
    d.score = score;
    d.class_id = class_id;
    d.embedding = std::move(embedding);
    normalize(d.embedding);
    return d;
}

double cosine_distance(const std::vector<float>& a, const std::vector<float>& b) {
    if (a.size() != b.size() || a.empty()) return 1.0;
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na < 1e-24 || nb < 1e-24) return 1.0;
    return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

StepResult Tracker::step(const std::vector<Detection>& detections) {
    StepResult result;

    for (Track& t : tracks_) t.kstate = kf_predict(t.kstate);

    std::vector<int> high, low;
    for (int i = 0; i < static_cast<int>(detections.size()); ++i)
        (detections[i].score >= config_.tau ? high : low).push_back(i);

    std::vector<int> track_pool(tracks_.size());
    for (std::size_t i = 0; i < tracks_.size(); ++i) track_pool[i] = static_cast<int>(i);

    std::vector<char> det_matched(detections.size(), 0);
    std::vector<char> trk_matched(tracks_.size(), 0);

    auto commit = [&](int ti, int di) {
        Track& t = tracks_[ti];
        const Detection& d = detections[di];
        t.kstate = kf_update(t.kstate, d.box);
        // EMA with renormalization keeps the smoothed embedding on the sphere.
        if (t.embedding.size() == d.embedding.size()) {
            for (std::size_t j = 0; j < t.embedding.size(); ++j)
                t.embedding[j] = config_.ema_alpha * t.embedding[j] +
                                 (1.0f - config_.ema_alpha) * d.embedding[j];
            normalize(t.embedding);
        } else {
            t.embedding = d.embedding;
        }
        t.frames_since_update = 0;
        t.hits += 1;
        t.last_score = d.score;
        if (t.hits >= config_.confirm_hits) t.status = TrackStatus::Active;
        trk_matched[ti] = 1;
        det_matched[di] = 1;
        result.matched.emplace_back(t.track_id, di);
    };

    // Stage 1: high-confidence detections vs all tracks on appearance,
    // Mahalanobis-gated.
    {
        std::vector<int> rows, cols;
        for (int ti : track_pool) rows.push_back(ti);
        for (int di : high) cols.push_back(di);
        if (!rows.empty() && !cols.empty()) {
            CostMatrix cost(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
            for (int r = 0; r < cost.rows; ++r) {
                for (int c = 0; c < cost.cols; ++c) {
                    const Track& t = tracks_[rows[r]];
                    const Detection& d = detections[cols[c]];
                    if (config_.class_aware && t.class_id != d.class_id) {
                        cost.at(r, c) = CostMatrix::forbidden();
                        continue;
                    }
                    const double d2 = squared_mahalanobis(t.kstate, d.box);
                    if (d2 > config_.gate) {
                        cost.at(r, c) = CostMatrix::forbidden();
                        continue;
                    }
                    const double app = cosine_distance(t.embedding, d.embedding);
                    cost.at(r, c) = (1.0 - config_.maha_blend_weight) * app +
                                    config_.maha_blend_weight * (d2 / config_.gate);
                }
            }
            for (const auto& [r, c] : hungarian(cost))
                if (cost.at(r, c) <= config_.appearance_match_threshold)
                    commit(rows[r], cols[c]);
        }
    }

    // Stage 2: remaining high-confidence detections vs remaining tracks on IOU.
    auto iou_stage = [&](const std::vector<int>& det_idx, float iou_min) {
        std::vector<int> rows, cols;
        for (int ti : track_pool)
            if (!trk_matched[ti]) rows.push_back(ti);
        for (int di : det_idx)
            if (!det_matched[di]) cols.push_back(di);
        if (rows.empty() || cols.empty()) return;
        CostMatrix cost(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
        for (int r = 0; r < cost.rows; ++r) {
            for (int c = 0; c < cost.cols; ++c) {
                const Track& t = tracks_[rows[r]];
                const Detection& d = detections[cols[c]];
                if (config_.class_aware && t.class_id != d.class_id) {
                    cost.at(r, c) = CostMatrix::forbidden();
                    continue;
                }
                const double overlap = iou(t.kstate.to_box(), d.box);
                cost.at(r, c) = overlap < iou_min ? CostMatrix::forbidden() : 1.0 - overlap;
            }
        }
        for (const auto& [r, c] : hungarian(cost)) commit(rows[r], cols[c]);
    };
    iou_stage(high, config_.iou_threshold_high);

    // Stage 3: low-confidence detections recover still-unmatched tracks on IOU.
    iou_stage(low, config_.iou_threshold_low);

    // Unmatched high-confidence detections start new tracks; unmatched
    // low-confidence detections are dropped.
    for (int di : high) {
        if (det_matched[di]) continue;
        const Detection& d = detections[di];
        if (d.score < config_.min_score_new) continue;
        Track t;
        t.track_id = next_id_++;
        t.kstate = kf_initiate(d.box);
        t.embedding = d.embedding;
        t.class_id = d.class_id;
        t.status = config_.confirm_hits <= 1 ? TrackStatus::Active : TrackStatus::Tentative;
        t.hits = 1;
        t.last_score = d.score;
        tracks_.push_back(std::move(t));
        result.new_track_ids.push_back(tracks_.back().track_id);
    }

    // Lifecycle: stale tracks age out; tentative tracks need consecutive hits.
    // Indices past trk_matched.size() are tracks born this frame.
    std::vector<Track> kept;
    kept.reserve(tracks_.size());
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
        Track& t = tracks_[i];
        if (i >= trk_matched.size() || trk_matched[i]) {
            kept.push_back(std::move(t));
            continue;
        }
        if (t.status == TrackStatus::Tentative) {
            result.removed_track_ids.push_back(t.track_id);
            continue;
        }
        t.frames_since_update += 1;
        t.status = TrackStatus::Lost;
        if (t.frames_since_update > config_.max_lost) {
            result.removed_track_ids.push_back(t.track_id);
        } else {
            result.lost_track_ids.push_back(t.track_id);
            kept.push_back(std::move(t));
        }
    }
    tracks_ = std::move(kept);
    return result;
}

TrajectorySet run_sequence(const std::vector<std::vector<Detection>>& frames,
                           const TrackerConfig& config) {
    Tracker tracker(config);
    TrajectorySet out;
    for (std::size_t f = 0; f < frames.size(); ++f) {
        tracker.step(frames[f]);
        std::vector<TrackRecord>& records = out[static_cast<int>(f) + 1];
        for (const Track& t : tracker.tracks()) {
            if (t.status != TrackStatus::Active || t.frames_since_update != 0) continue;
            records.push_back({t.track_id, t.kstate.to_box(), t.last_score, t.class_id});
        }
    }
    return out;
}

}  // namespace skymot::assoc
