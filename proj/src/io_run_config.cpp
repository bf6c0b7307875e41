#include "skymot/io/run_config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "skymot/errors.hpp"

namespace skymot::io {

namespace {

using nlohmann::json;

// Pulls known keys out of an object and complains about anything left over,
// naming the full key path.
class Section {
public:
    Section(json node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
        if (!node_.is_object()) throw ConfigError(path_ + ": expected an object");
    }

    ~Section() = default;

    template <typename T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        const auto it = node_.find(key);
        if (it == node_.end()) return;
        try {
            out = it->get<T>();
        } catch (const json::exception&) {
            throw ConfigError(path_ + "." + key + ": wrong value type");
        }
    }

    json child(const char* key) {
        seen_.insert(key);
        const auto it = node_.find(key);
        return it == node_.end() ? json::object() : *it;
    }

    void finish() const {
        for (const auto& [key, _] : node_.items())
            if (!seen_.count(key)) throw ConfigError("unknown key: " + path_ + "." + key);
    }

private:
    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

void check(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(origin + ": " + e.what());
    }

    RunConfig cfg;
    Section top(root, origin);

    {
        Section s(top.child("tracker"), origin + ".tracker");
        s.get("tau", cfg.tracker.tau);
        s.get("max_lost", cfg.tracker.max_lost);
        s.get("gate", cfg.tracker.gate);
        s.get("appearance_match_threshold", cfg.tracker.appearance_match_threshold);
        s.get("iou_threshold_high", cfg.tracker.iou_threshold_high);
        s.get("iou_threshold_low", cfg.tracker.iou_threshold_low);
        s.get("ema_alpha", cfg.tracker.ema_alpha);
        s.get("min_score_new", cfg.tracker.min_score_new);
        s.get("maha_blend_weight", cfg.tracker.maha_blend_weight);
        s.get("confirm_hits", cfg.tracker.confirm_hits);
        s.get("class_aware", cfg.tracker.class_aware);
        s.finish();
    }
    {
        Section s(top.child("scene"), origin + ".scene");
        s.get("num_targets", cfg.scene.num_targets);
        s.get("num_frames", cfg.scene.num_frames);
        s.get("image_w", cfg.scene.image_w);
        s.get("image_h", cfg.scene.image_h);
        s.get("speed_min", cfg.scene.speed_min);
        s.get("speed_max", cfg.scene.speed_max);
        s.get("ego_amplitude", cfg.scene.ego_amplitude);
        s.get("birth_rate", cfg.scene.birth_rate);
        s.get("death_rate", cfg.scene.death_rate);
        s.get("box_min", cfg.scene.box_min);
        s.get("box_max", cfg.scene.box_max);
        s.get("seed", cfg.scene.seed);
        s.finish();
    }
    {
        Section s(top.child("corruption"), origin + ".corruption");
        s.get("miss_rate", cfg.corruption.miss_rate);
        s.get("fp_rate", cfg.corruption.fp_rate);
        s.get("center_noise_sigma", cfg.corruption.center_noise_sigma);
        s.get("embed_noise_sigma", cfg.corruption.embed_noise_sigma);
        s.get("score_true_mean", cfg.corruption.score_true_mean);
        s.get("score_fp_mean", cfg.corruption.score_fp_mean);
        s.get("seed", cfg.corruption.seed);
        s.finish();
    }
    {
        Section s(top.child("layout"), origin + ".layout");
        s.get("classes", cfg.layout.classes);
        s.get("height", cfg.layout.height);
        s.get("width", cfg.layout.width);
        s.get("stride", cfg.layout.stride);
        s.get("embed_dim", cfg.layout.embed_dim);
        s.get("fm_channels", cfg.layout.fm_channels);
        s.finish();
    }
    top.get("seed", cfg.seed);
    top.get("output_dir", cfg.output_dir);
    top.finish();

    check(cfg.tracker.tau > 0.0f && cfg.tracker.tau < 1.0f, "tracker.tau must be in (0,1)");
    check(cfg.tracker.max_lost >= 1, "tracker.max_lost must be >= 1");
    check(cfg.tracker.ema_alpha >= 0.0f && cfg.tracker.ema_alpha <= 1.0f,
          "tracker.ema_alpha must be in [0,1]");
    check(cfg.scene.num_frames > 0, "scene.num_frames must be positive");
    check(cfg.scene.speed_min >= 0 && cfg.scene.speed_max >= cfg.scene.speed_min,
          "scene speed range is invalid");
    check(cfg.scene.box_min > 0 && cfg.scene.box_max >= cfg.scene.box_min,
          "scene box size range is invalid");
    for (double p : {cfg.scene.birth_rate, cfg.scene.death_rate, cfg.corruption.miss_rate,
                     cfg.corruption.fp_rate})
        check(p >= 0.0 && p <= 1.0, "probabilities must be in [0,1]");
    check(cfg.corruption.center_noise_sigma >= 0 && cfg.corruption.embed_noise_sigma >= 0,
          "corruption sigmas must be >= 0");
    check(cfg.layout.classes > 0 && cfg.layout.height > 0 && cfg.layout.width > 0 &&
              cfg.layout.stride > 0 && cfg.layout.embed_dim > 0 && cfg.layout.fm_channels > 0,
          "layout dims must be positive");
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_run_config(text, path.string());
}

}  // namespace skymot::io
