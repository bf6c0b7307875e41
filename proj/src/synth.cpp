#include "skymot/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "skymot/errors.hpp"

namespace skymot::synth {

namespace {

struct TargetState {
    int id;
    double cx, cy, vx, vy, w, h;
};

TargetState spawn(int id, const SceneConfig& c, Rng& rng) {
    TargetState t;
    t.id = id;
    t.w = rng.uniform(c.box_min, c.box_max);
    t.h = rng.uniform(c.box_min, c.box_max);
    t.cx = rng.uniform(t.w / 2, c.image_w - t.w / 2);
    t.cy = rng.uniform(t.h / 2, c.image_h - t.h / 2);
    const double speed = rng.uniform(c.speed_min, c.speed_max);
    const double angle = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    t.vx = speed * std::cos(angle);
    t.vy = speed * std::sin(angle);
    return t;
}

// Reflect value into [lo, hi], flipping the velocity on each bounce.
void bounce(double& pos, double& vel, double lo, double hi) {
    if (hi <= lo) {
        pos = lo;
        return;
    }
    while (pos < lo || pos > hi) {
        if (pos < lo) {
            pos = 2 * lo - pos;
            vel = -vel;
        } else {
            pos = 2 * hi - pos;
            vel = -vel;
        }
    }
}

}  // namespace

GroundTruth generate_scene(const SceneConfig& config) {
    if (config.num_targets < 0 || config.num_frames <= 0 || config.image_w <= 0 ||
        config.image_h <= 0 || config.box_min <= 0 || config.box_max < config.box_min)
        throw ArgumentError("generate_scene: invalid scene config");

    Rng rng(config.seed);
    std::vector<TargetState> live;
    int next_id = 1;
    for (int i = 0; i < config.num_targets; ++i) live.push_back(spawn(next_id++, config, rng));

    GroundTruth gt;
    for (int f = 1; f <= config.num_frames; ++f) {
        const double ego_dx = config.ego_amplitude > 0 ? rng.uniform(-config.ego_amplitude, config.ego_amplitude) : 0.0;
        const double ego_dy = config.ego_amplitude > 0 ? rng.uniform(-config.ego_amplitude, config.ego_amplitude) : 0.0;

        std::vector<TargetState> survivors;
        for (TargetState& t : live) {
            if (f > 1) {
                t.cx += t.vx + ego_dx;
                t.cy += t.vy + ego_dy;
                bounce(t.cx, t.vx, t.w / 2, config.image_w - t.w / 2);
                bounce(t.cy, t.vy, t.h / 2, config.image_h - t.h / 2);
            }
            if (config.death_rate > 0 && rng.bernoulli(config.death_rate)) continue;
            survivors.push_back(t);
        }
        if (config.birth_rate > 0 && rng.bernoulli(config.birth_rate))
            survivors.push_back(spawn(next_id++, config, rng));
        live = std::move(survivors);

        std::vector<metrics::AnnotatedBox>& frame = gt[f];
        for (const TargetState& t : live) {
            metrics::AnnotatedBox b;
            b.frame = f;
            b.id = t.id;
            b.box = {static_cast<float>(t.cx - t.w / 2), static_cast<float>(t.cy - t.h / 2),
                     static_cast<float>(t.w), static_cast<float>(t.h)};
            b.class_id = 0;
            frame.push_back(b);
        }
    }
    return gt;
}

std::vector<float> id_prototype(int id, int dim) {
    Rng rng(hash_combine(0x70726f746fULL, static_cast<std::uint64_t>(id)));
    std::vector<float> v(dim);
    double norm = 0.0;
    for (float& x : v) {
        x = static_cast<float>(rng.normal());
        norm += static_cast<double>(x) * x;
    }
    norm = std::sqrt(norm);
    if (norm < 1e-12) {
        v.assign(dim, 0.0f);
        v[0] = 1.0f;
        return v;
    }
    for (float& x : v) x = static_cast<float>(x / norm);
    return v;
}

std::map<int, std::vector<float>> make_prototypes(const GroundTruth& gt, int dim) {
    std::map<int, std::vector<float>> protos;
    for (const auto& [f, boxes] : gt)
        for (const metrics::AnnotatedBox& b : boxes)
            if (!protos.count(b.id)) protos[b.id] = id_prototype(b.id, dim);
    return protos;
}

std::map<int, std::vector<assoc::Detection>> corrupt(
    const GroundTruth& gt, const CorruptionConfig& config,
    const std::map<int, std::vector<float>>& prototypes) {
    if (prototypes.empty() && !gt.empty())
        throw ArgumentError("corrupt: prototype map is empty");
    int dim = 0;
    for (const auto& [id, p] : prototypes) {
        dim = static_cast<int>(p.size());
        break;
    }

    Rng rng(config.seed);
    std::map<int, std::vector<assoc::Detection>> out;
    for (const auto& [f, boxes] : gt) {
        std::vector<assoc::Detection>& dets = out[f];
        double max_w = 32.0, max_h = 32.0, img_w = 0.0, img_h = 0.0;
        for (const metrics::AnnotatedBox& b : boxes) {
            img_w = std::max(img_w, static_cast<double>(b.box.right()));
            img_h = std::max(img_h, static_cast<double>(b.box.bottom()));
            max_w = std::max(max_w, static_cast<double>(b.box.width));
            max_h = std::max(max_h, static_cast<double>(b.box.height));
            if (config.miss_rate > 0 && rng.bernoulli(config.miss_rate)) continue;

            const auto pit = prototypes.find(b.id);
            if (pit == prototypes.end())
                throw ArgumentError("corrupt: no prototype for id " + std::to_string(b.id));
            std::vector<float> emb = pit->second;
            if (config.embed_noise_sigma > 0)
                for (float& x : emb)
                    x = static_cast<float>(x + rng.normal(0.0, config.embed_noise_sigma));

            Box box = b.box;
            if (config.center_noise_sigma > 0) {
                box.left += static_cast<float>(rng.normal(0.0, config.center_noise_sigma));
                box.top += static_cast<float>(rng.normal(0.0, config.center_noise_sigma));
            }
            const float score =
                static_cast<float>(std::clamp(config.score_true_mean, 0.0, 1.0));
            dets.push_back(assoc::Detection::make(box, score, b.class_id, std::move(emb)));
        }

        if (config.fp_rate > 0 && rng.bernoulli(config.fp_rate)) {
            Box fp;
            fp.width = static_cast<float>(rng.uniform(8.0, max_w));
            fp.height = static_cast<float>(rng.uniform(8.0, max_h));
            fp.left = static_cast<float>(rng.uniform(0.0, std::max(1.0, img_w - fp.width)));
            fp.top = static_cast<float>(rng.uniform(0.0, std::max(1.0, img_h - fp.height)));
            std::vector<float> emb(dim > 0 ? dim : 16);
            for (float& x : emb) x = static_cast<float>(rng.normal());
            const float score = static_cast<float>(std::clamp(config.score_fp_mean, 0.0, 1.0));
            dets.push_back(assoc::Detection::make(fp, score, 0, std::move(emb)));
        }
    }
    return out;
}

double gaussian_radius(double height, double width, double min_overlap) {
    // Three overlap constraints (pred box inside, outside, straddling); the
    // tightest root wins.
    const double a1 = 1.0;
    const double b1 = height + width;
    const double c1 = width * height * (1 - min_overlap) / (1 + min_overlap);
    const double r1 = (b1 + std::sqrt(b1 * b1 - 4 * a1 * c1)) / 2;

    const double a2 = 4.0;
    const double b2 = 2 * (height + width);
    const double c2 = (1 - min_overlap) * width * height;
    const double r2 = (b2 + std::sqrt(b2 * b2 - 4 * a2 * c2)) / 2;

    const double a3 = 4 * min_overlap;
    const double b3 = -2 * min_overlap * (height + width);
    const double c3 = (min_overlap - 1) * width * height;
    const double r3 = (b3 + std::sqrt(b3 * b3 - 4 * a3 * c3)) / 2;
    return std::max(0.0, std::min({r1, r2, r3}));
}

RenderedMaps render_maps(const std::vector<metrics::AnnotatedBox>& gt_frame,
                         const MapLayout& layout) {
    RenderedMaps maps;
    maps.hm = FeatureMap(layout.classes, layout.height, layout.width, 0.0f);
    maps.idmap = FeatureMap(layout.embed_dim, layout.height, layout.width, 0.0f);

    // Smooth pseudo-random backbone stand-in, seeded by the frame content so
    // identical frames render identical features.
    std::uint64_t content = 0x66656174ULL;
    for (const metrics::AnnotatedBox& b : gt_frame) {
        content = hash_combine(content, static_cast<std::uint64_t>(b.id));
        content = hash_combine(content, static_cast<std::uint64_t>(b.frame));
        content = hash_combine(content, static_cast<std::uint64_t>(std::llround(b.box.left * 8)));
        content = hash_combine(content, static_cast<std::uint64_t>(std::llround(b.box.top * 8)));
    }
    maps.fm = FeatureMap(layout.fm_channels, layout.height, layout.width);
    {
        const int ch = 4, cw = 6;  // coarse grid, bilinearly upsampled
        Rng rng(content);
        std::vector<float> coarse(static_cast<std::size_t>(layout.fm_channels) * (ch + 1) * (cw + 1));
        for (float& v : coarse) v = static_cast<float>(rng.normal());
        for (int c = 0; c < layout.fm_channels; ++c) {
            for (int y = 0; y < layout.height; ++y) {
                const double gy = static_cast<double>(y) / layout.height * ch;
                const int y0 = static_cast<int>(gy);
                const double fy = gy - y0;
                for (int x = 0; x < layout.width; ++x) {
                    const double gx = static_cast<double>(x) / layout.width * cw;
                    const int x0 = static_cast<int>(gx);
                    const double fx = gx - x0;
                    const auto at = [&](int yy, int xx) {
                        return coarse[(static_cast<std::size_t>(c) * (ch + 1) + yy) * (cw + 1) + xx];
                    };
                    maps.fm.at(c, y, x) = static_cast<float>(
                        at(y0, x0) * (1 - fy) * (1 - fx) + at(y0, x0 + 1) * (1 - fy) * fx +
                        at(y0 + 1, x0) * fy * (1 - fx) + at(y0 + 1, x0 + 1) * fy * fx);
                }
            }
        }
    }

    std::vector<int> frame_ids;
    for (const metrics::AnnotatedBox& b : gt_frame) {
        const double cxf = b.box.cx() / layout.stride;
        const double cyf = b.box.cy() / layout.stride;
        const int cx = std::clamp(static_cast<int>(cxf), 0, layout.width - 1);
        const int cy = std::clamp(static_cast<int>(cyf), 0, layout.height - 1);
        const int cls = std::clamp(b.class_id, 0, layout.classes - 1);

        const double radius =
            gaussian_radius(b.box.height / layout.stride, b.box.width / layout.stride);
        const int r = std::max(0, static_cast<int>(radius));
        const double sigma = (2.0 * r + 1.0) / 6.0;
        for (int dy = -r; dy <= r; ++dy) {
            const int y = cy + dy;
            if (y < 0 || y >= layout.height) continue;
            for (int dx = -r; dx <= r; ++dx) {
                const int x = cx + dx;
                if (x < 0 || x >= layout.width) continue;
                const float v = static_cast<float>(
                    std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma)));
                maps.hm.at(cls, y, x) = std::max(maps.hm.at(cls, y, x), v);
            }
        }
        maps.hm.at(cls, cy, cx) = 1.0f;  // peak is exact

        const std::vector<float> proto = id_prototype(b.id, layout.embed_dim);
        for (int c = 0; c < layout.embed_dim; ++c) maps.idmap.at(c, cy, cx) = proto[c];

        maps.reg.centers.emplace_back(cy, cx);
        maps.reg.offsets.push_back({static_cast<float>(cxf - cx), static_cast<float>(cyf - cy)});
        maps.reg.sizes.push_back({static_cast<float>(b.box.width / layout.stride),
                                  static_cast<float>(b.box.height / layout.stride)});
        maps.idt.centers.emplace_back(cy, cx);
        frame_ids.push_back(b.id);
    }

    // Identity labels index the sorted distinct ids of the frame; the dense
    // classifier is a deterministic pseudo-random stand-in.
    std::vector<int> uniq = frame_ids;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    for (int id : frame_ids)
        maps.idt.labels.push_back(static_cast<int>(
            std::lower_bound(uniq.begin(), uniq.end(), id) - uniq.begin()));
    const int n_classes = std::max<int>(2, static_cast<int>(uniq.size()));
    maps.idt.classifier_w = Matrix(n_classes, layout.embed_dim);
    Rng crng(hash_combine(0x636c7366ULL, content));
    const float scale = 1.0f / std::sqrt(static_cast<float>(layout.embed_dim));
    for (float& v : maps.idt.classifier_w.values)
        v = static_cast<float>(crng.normal()) * scale;
    maps.idt.classifier_b.assign(n_classes, 0.0f);
    return maps;
}

std::pair<int, int> sample_training_pair(const GroundTruth& gt, int max_interval, Rng& rng) {
    const int n = static_cast<int>(gt.size());
    if (max_interval < 1) throw ArgumentError("sample_training_pair: max_interval must be >= 1");
    if (n <= max_interval)
        throw ArgumentError("sample_training_pair: sequence of " + std::to_string(n) +
                            " frames is too short for interval " + std::to_string(max_interval));
    const int delta = 1 + rng.uniform_int(max_interval);
    const int t = delta + 1 + rng.uniform_int(n - delta);  // t in [delta+1, n]
    return {t - delta, t};
}

}  // namespace skymot::synth
