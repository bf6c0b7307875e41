#include "skymot/metrics.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "skymot/assignment.hpp"

namespace skymot::metrics {

FrameBoxes group_by_frame(const std::vector<AnnotatedBox>& boxes) {
    FrameBoxes out;
    for (const AnnotatedBox& b : boxes) out[b.frame].push_back(b);
    return out;
}

namespace {

bool class_ok(const EvalOptions& opts, const AnnotatedBox& a, const AnnotatedBox& b) {
    return !opts.class_aware || a.class_id == b.class_id;
}

}  // namespace

FrameMatchResult frame_match(const std::vector<AnnotatedBox>& gt,
                             const std::vector<AnnotatedBox>& pred,
                             const EvalOptions& opts, MatchCarry& carry) {
    FrameMatchResult res;
    std::vector<char> gt_used(gt.size(), 0), pred_used(pred.size(), 0);

    // CLEAR continuity: keep last frame's correspondence while it still overlaps.
    for (std::size_t g = 0; g < gt.size(); ++g) {
        const auto it = carry.prev.find(gt[g].id);
        if (it == carry.prev.end()) continue;
        for (std::size_t p = 0; p < pred.size(); ++p) {
            if (pred_used[p] || pred[p].id != it->second) continue;
            if (class_ok(opts, gt[g], pred[p]) && iou(gt[g].box, pred[p].box) >= opts.iou_min) {
                res.matches.emplace_back(static_cast<int>(g), static_cast<int>(p));
                gt_used[g] = pred_used[p] = 1;
            }
            break;
        }
    }

    // Remaining pairs by minimum IOU-distance assignment.
    std::vector<int> free_gt, free_pred;
    for (std::size_t g = 0; g < gt.size(); ++g)
        if (!gt_used[g]) free_gt.push_back(static_cast<int>(g));
    for (std::size_t p = 0; p < pred.size(); ++p)
        if (!pred_used[p]) free_pred.push_back(static_cast<int>(p));
    if (!free_gt.empty() && !free_pred.empty()) {
        assoc::CostMatrix cost(static_cast<int>(free_gt.size()), static_cast<int>(free_pred.size()));
        for (int r = 0; r < cost.rows; ++r) {
            for (int c = 0; c < cost.cols; ++c) {
                const AnnotatedBox& g = gt[free_gt[r]];
                const AnnotatedBox& p = pred[free_pred[c]];
                const double overlap = class_ok(opts, g, p) ? iou(g.box, p.box) : 0.0;
                cost.at(r, c) =
                    overlap >= opts.iou_min ? 1.0 - overlap : assoc::CostMatrix::forbidden();
            }
        }
        for (const auto& [r, c] : assoc::hungarian(cost)) {
            res.matches.emplace_back(free_gt[r], free_pred[c]);
            gt_used[free_gt[r]] = pred_used[free_pred[c]] = 1;
        }
    }

    // Switch counting against the last known association of each gt id.
    std::sort(res.matches.begin(), res.matches.end());
    carry.prev.clear();
    for (const auto& [g, p] : res.matches) {
        const int gid = gt[g].id, pid = pred[p].id;
        const auto it = carry.last.find(gid);
        if (it != carry.last.end() && it->second != pid) res.id_switches += 1;
        carry.last[gid] = pid;
        carry.prev[gid] = pid;
    }

    for (std::size_t g = 0; g < gt.size(); ++g)
        if (!gt_used[g]) res.misses.push_back(static_cast<int>(g));
    for (std::size_t p = 0; p < pred.size(); ++p)
        if (!pred_used[p]) res.false_positives.push_back(static_cast<int>(p));
    return res;
}

SequenceMetrics clear_mot(const FrameBoxes& gt, const FrameBoxes& pred, const EvalOptions& opts) {
    SequenceMetrics m;
    MatchCarry carry;
    std::map<int, int> gt_lifespan, gt_matched_frames;

    std::set<int> frames;
    for (const auto& [f, _] : gt) frames.insert(f);
    for (const auto& [f, _] : pred) frames.insert(f);

    static const std::vector<AnnotatedBox> kEmpty;
    for (int f : frames) {
        const auto git = gt.find(f);
        const auto pit = pred.find(f);
        const std::vector<AnnotatedBox>& g = git == gt.end() ? kEmpty : git->second;
        const std::vector<AnnotatedBox>& p = pit == pred.end() ? kEmpty : pit->second;
        const FrameMatchResult r = frame_match(g, p, opts, carry);
        m.tp += static_cast<long long>(r.matches.size());
        m.fp += static_cast<long long>(r.false_positives.size());
        m.fn += static_cast<long long>(r.misses.size());
        m.ids += r.id_switches;
        m.total_gt += static_cast<long long>(g.size());
        for (const AnnotatedBox& b : g) gt_lifespan[b.id] += 1;
        for (const auto& [gi, pi] : r.matches) gt_matched_frames[g[gi].id] += 1;
    }

    m.gt_tracks = static_cast<int>(gt_lifespan.size());
    for (const auto& [gid, span] : gt_lifespan) {
        const double ratio = static_cast<double>(gt_matched_frames[gid]) / span;
        if (ratio >= 0.8) m.mt += 1;
        if (ratio <= 0.2) m.ml += 1;
    }

    if (m.total_gt > 0)
        m.mota = 1.0 - static_cast<double>(m.fn + m.fp + m.ids) / static_cast<double>(m.total_gt);
    m.precision = (m.tp + m.fp) > 0 ? static_cast<double>(m.tp) / (m.tp + m.fp) : 0.0;
    m.recall = (m.tp + m.fn) > 0 ? static_cast<double>(m.tp) / (m.tp + m.fn) : 0.0;
    return m;
}

IdScores id_metrics(const FrameBoxes& gt, const FrameBoxes& pred, const EvalOptions& opts) {
    // Per-(gt id, pred id) count of frames where the two boxes overlap enough.
    std::map<std::pair<int, int>, long long> overlap;
    long long total_gt = 0, total_pred = 0;
    std::set<int> frames;
    for (const auto& [f, v] : gt) {
        frames.insert(f);
        total_gt += static_cast<long long>(v.size());
    }
    for (const auto& [f, v] : pred) {
        frames.insert(f);
        total_pred += static_cast<long long>(v.size());
    }
    std::set<int> gt_ids, pred_ids;
    for (int f : frames) {
        const auto git = gt.find(f);
        const auto pit = pred.find(f);
        if (git == gt.end() || pit == pred.end()) continue;
        for (const AnnotatedBox& g : git->second) {
            gt_ids.insert(g.id);
            for (const AnnotatedBox& p : pit->second) {
                pred_ids.insert(p.id);
                if (class_ok(opts, g, p) && iou(g.box, p.box) >= opts.iou_min)
                    overlap[{g.id, p.id}] += 1;
            }
        }
    }

    // One global assignment maximizing the total overlap = IDTP.
    long long idtp = 0;
    if (!overlap.empty()) {
        std::vector<int> gv(gt_ids.begin(), gt_ids.end());
        std::vector<int> pv(pred_ids.begin(), pred_ids.end());
        assoc::CostMatrix cost(static_cast<int>(gv.size()), static_cast<int>(pv.size()), 0.0);
        for (int r = 0; r < cost.rows; ++r)
            for (int c = 0; c < cost.cols; ++c) {
                const auto it = overlap.find({gv[r], pv[c]});
                cost.at(r, c) = it == overlap.end() ? 0.0 : -static_cast<double>(it->second);
            }
        for (const auto& [r, c] : assoc::hungarian(cost))
            idtp += static_cast<long long>(-cost.at(r, c));
    }

    IdScores s;
    s.idtp = idtp;
    s.idfp = total_pred - idtp;
    s.idfn = total_gt - idtp;
    s.idp = total_pred > 0 ? static_cast<double>(idtp) / total_pred : 0.0;
    s.idr = total_gt > 0 ? static_cast<double>(idtp) / total_gt : 0.0;
    const long long denom = total_gt + total_pred;
    s.idf1 = denom > 0 ? 2.0 * static_cast<double>(idtp) / denom : 0.0;
    return s;
}

MetricsReport evaluate(const std::vector<std::tuple<std::string, FrameBoxes, FrameBoxes>>& sequences,
                       const EvalOptions& opts) {
    MetricsReport report;
    SequenceMetrics& agg = report.aggregate;
    agg.name = "OVERALL";
    long long agg_pred = 0;
    for (const auto& [name, gt, pred] : sequences) {
        SequenceMetrics m = clear_mot(gt, pred, opts);
        const IdScores s = id_metrics(gt, pred, opts);
        m.name = name;
        m.idf1 = s.idf1;
        m.idp = s.idp;
        m.idr = s.idr;
        m.idtp = s.idtp;
        m.idfp = s.idfp;
        m.idfn = s.idfn;
        agg.tp += m.tp;
        agg.fp += m.fp;
        agg.fn += m.fn;
        agg.ids += m.ids;
        agg.total_gt += m.total_gt;
        agg.mt += m.mt;
        agg.ml += m.ml;
        agg.gt_tracks += m.gt_tracks;
        agg.idtp += m.idtp;
        agg.idfp += m.idfp;
        agg.idfn += m.idfn;
        agg_pred += m.idtp + m.idfp;
        report.per_sequence.push_back(std::move(m));
    }
    if (agg.total_gt > 0)
        agg.mota =
            1.0 - static_cast<double>(agg.fn + agg.fp + agg.ids) / static_cast<double>(agg.total_gt);
    agg.precision = (agg.tp + agg.fp) > 0 ? static_cast<double>(agg.tp) / (agg.tp + agg.fp) : 0.0;
    agg.recall = (agg.tp + agg.fn) > 0 ? static_cast<double>(agg.tp) / (agg.tp + agg.fn) : 0.0;
    agg.idp = agg_pred > 0 ? static_cast<double>(agg.idtp) / agg_pred : 0.0;
    agg.idr = agg.total_gt > 0 ? static_cast<double>(agg.idtp) / agg.total_gt : 0.0;
    const long long denom = agg.total_gt + agg_pred;
    agg.idf1 = denom > 0 ? 2.0 * static_cast<double>(agg.idtp) / denom : 0.0;
    return report;
}

}  // namespace skymot::metrics
