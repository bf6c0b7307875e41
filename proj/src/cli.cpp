#include "skymot/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <future>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "skymot/assignment.hpp"
#include "skymot/errors.hpp"
#include "skymot/io/atomic_file.hpp"
#include "skymot/io/mot_file.hpp"
#include "skymot/io/params_io.hpp"
#include "skymot/io/report.hpp"
#include "skymot/io/run_config.hpp"
#include "skymot/io/sidecar.hpp"
#include "skymot/losses.hpp"
#include "skymot/metrics.hpp"
#include "skymot/param_factory.hpp"
#include "skymot/synth.hpp"
#include "skymot/tracker.hpp"

namespace skymot {

namespace {

namespace fs = std::filesystem;

io::RunConfig load_config_or_default(const std::string& path) {
    if (path.empty()) return io::RunConfig{};
    return io::load_run_config(path);
}

// ---- synth ----------------------------------------------------------------

int cmd_synth(const std::string& config_path, std::uint64_t seed_override, bool has_seed,
              const std::string& out_override) {
    io::RunConfig cfg = load_config_or_default(config_path);
    if (has_seed) {
        cfg.scene.seed = seed_override;
        cfg.corruption.seed = hash_combine(seed_override, 0x636f7272ULL);
    }
    const fs::path out_dir = out_override.empty() ? fs::path(cfg.output_dir) : fs::path(out_override);

    const synth::GroundTruth gt = synth::generate_scene(cfg.scene);
    const auto prototypes = synth::make_prototypes(gt, cfg.layout.embed_dim);
    const auto detections = synth::corrupt(gt, cfg.corruption, prototypes);

    io::write_mot_file(out_dir / "gt.txt", io::from_ground_truth(gt));
    io::write_mot_file(out_dir / "det.txt", io::from_detections(detections));

    io::EmbeddingSidecar sidecar;
    sidecar.dim = static_cast<std::uint16_t>(cfg.layout.embed_dim);
    for (const auto& [frame, dets] : detections) {
        for (std::size_t i = 0; i < dets.size(); ++i) {
            io::EmbeddingRecord rec;
            rec.frame = static_cast<std::uint32_t>(frame);
            rec.det_index = static_cast<std::uint32_t>(i);
            rec.values = dets[i].embedding;
            sidecar.records.push_back(std::move(rec));
        }
    }
    io::write_embeddings(out_dir / "det.stce", sidecar);

    std::cout << "wrote " << (out_dir / "gt.txt").string() << ", det.txt, det.stce ("
              << gt.size() << " frames)\n";
    return 0;
}

// ---- track ----------------------------------------------------------------

void attach_embeddings(std::map<int, std::vector<assoc::Detection>>& dets,
                       const io::EmbeddingSidecar& sidecar, const std::string& origin) {
    for (const io::EmbeddingRecord& rec : sidecar.records) {
        const auto it = dets.find(static_cast<int>(rec.frame));
        if (it == dets.end() || rec.det_index >= it->second.size())
            throw FormatError(origin + ": embedding record (frame " + std::to_string(rec.frame) +
                              ", det " + std::to_string(rec.det_index) +
                              ") has no matching detection");
        it->second[rec.det_index].embedding = rec.values;
    }
}

void track_one(const fs::path& det_path, const fs::path& emb_path, const fs::path& out_path,
               const assoc::TrackerConfig& config) {
    auto dets = io::to_detections(io::parse_mot_file(det_path));
    attach_embeddings(dets, io::read_embeddings(emb_path), det_path.string());

    std::vector<std::vector<assoc::Detection>> frames;
    const int last = dets.empty() ? 0 : dets.rbegin()->first;
    frames.resize(last);
    for (auto& [frame, v] : dets) frames[frame - 1] = std::move(v);

    const assoc::TrajectorySet trajectories = assoc::run_sequence(frames, config);
    io::write_mot_file(out_path, io::from_trajectories(trajectories));
}

int cmd_track(const std::string& det, const std::string& emb, const std::string& config_path,
              const std::string& output, int jobs) {
    const io::RunConfig cfg = load_config_or_default(config_path);

    if (!fs::is_directory(det)) {
        track_one(det, emb, output, cfg.tracker);
        std::cout << "wrote " << output << "\n";
        return 0;
    }

    // Directory mode: every <seq>.txt with a <seq>.stce sidecar next to it in
    // the embeddings directory; one worker per sequence.
    std::vector<fs::path> det_files;
    for (const auto& e : fs::directory_iterator(det))
        if (e.path().extension() == ".txt") det_files.push_back(e.path());
    std::sort(det_files.begin(), det_files.end());
    if (det_files.empty()) throw ArgumentError("track: no .txt files under " + det);

    const fs::path emb_dir = emb.empty() ? fs::path(det) : fs::path(emb);
    const fs::path out_dir(output);
    fs::create_directories(out_dir);

    const int workers = std::max(1, jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency()));
    std::vector<std::future<void>> pending;
    for (const fs::path& dp : det_files) {
        const fs::path ep = emb_dir / dp.filename().replace_extension(".stce");
        const fs::path op = out_dir / dp.filename();
        pending.push_back(std::async(std::launch::async, track_one, dp, ep, op, cfg.tracker));
        if (static_cast<int>(pending.size()) >= workers) {
            for (auto& f : pending) f.get();
            pending.clear();
        }
    }
    for (auto& f : pending) f.get();
    std::cout << "wrote " << det_files.size() << " result files under " << output << "\n";
    return 0;
}

// ---- eval -----------------------------------------------------------------

int cmd_eval(const std::string& gt, const std::string& results, double iou_min, bool single_class,
             const std::string& report_path) {
    metrics::EvalOptions opts;
    opts.iou_min = iou_min;
    opts.class_aware = !single_class;

    std::vector<std::tuple<std::string, metrics::FrameBoxes, metrics::FrameBoxes>> sequences;
    if (fs::is_directory(gt)) {
        std::vector<fs::path> gt_files;
        for (const auto& e : fs::directory_iterator(gt))
            if (e.path().extension() == ".txt") gt_files.push_back(e.path());
        std::sort(gt_files.begin(), gt_files.end());
        if (gt_files.empty()) throw ArgumentError("eval: no .txt files under " + gt);
        for (const fs::path& gp : gt_files) {
            const fs::path rp = fs::path(results) / gp.filename();
            if (!fs::exists(rp)) throw ArgumentError("eval: missing results file " + rp.string());
            sequences.emplace_back(gp.stem().string(),
                                   io::to_frame_boxes(io::parse_mot_file(gp)),
                                   io::to_frame_boxes(io::parse_mot_file(rp)));
        }
    } else {
        sequences.emplace_back(fs::path(gt).stem().string(),
                               io::to_frame_boxes(io::parse_mot_file(gt)),
                               io::to_frame_boxes(io::parse_mot_file(results)));
    }

    const metrics::MetricsReport report = metrics::evaluate(sequences, opts);
    const std::string table = io::format_report(report);
    std::cout << table;
    if (!report_path.empty()) {
        io::AtomicFile file(report_path);
        file.stream() << table;
        file.commit();
    }
    return 0;
}

// ---- modules --------------------------------------------------------------

struct Check {
    std::string name;
    bool ok;
    std::string detail;
};

bool close_rel(float a, double b, double rtol) { return std::abs(a - b) <= rtol * (1.0 + std::abs(b)); }

int cmd_modules(const std::string& dump_dir, std::uint64_t seed, const std::string& tebm_blob,
                const std::string& tdrm_blob) {
    std::vector<Check> checks;
    const auto add = [&](const std::string& name, bool ok, const std::string& detail = "") {
        checks.push_back({name, ok, detail});
    };

    // Desk-scale rendered scene: two adjacent frames.
    synth::SceneConfig sc;
    sc.num_targets = 6;
    sc.num_frames = 4;
    sc.image_w = 96;
    sc.image_h = 64;
    sc.speed_min = 0.5;
    sc.speed_max = 2.0;
    sc.seed = seed;
    synth::MapLayout layout;  // 2 x 16 x 24, stride 4, embed 16
    layout.fm_channels = 16;
    const synth::GroundTruth gt = synth::generate_scene(sc);
    const synth::RenderedMaps prev = synth::render_maps(gt.at(1), layout);
    const synth::RenderedMaps curr = synth::render_maps(gt.at(2), layout);

    // Embedding boosting: identity parameterization must return the input.
    tebm::TebmParams tebm_id = tebm::TebmParams::identity(layout.embed_dim);
    FeatureMap id_curr_abs = curr.idmap;
    for (float& v : id_curr_abs.values) v = std::abs(v);
    const FeatureMap boosted_id = tebm::tebm_forward({prev.idmap, id_curr_abs}, tebm_id);
    {
        bool ok = boosted_id.same_shape(id_curr_abs);
        float worst = 0.0f;
        for (std::size_t i = 0; i < boosted_id.values.size(); ++i)
            worst = std::max(worst, std::abs(boosted_id.values[i] - id_curr_abs.values[i]));
        ok = ok && worst <= 1e-4f;
        add("tebm identity fallback", ok, "max dev " + std::to_string(worst));
    }

    const tebm::TebmParams tebm_params = tebm_blob.empty()
                                             ? random_tebm_params(layout.embed_dim, seed)
                                             : io::load_tebm_params(tebm_blob);
    const FeatureMap boosted = tebm::tebm_forward({prev.idmap, curr.idmap}, tebm_params);
    add("tebm shape preservation", boosted.same_shape(curr.idmap));

    // Detection refinement: zero attention convs gate the reduced map by 0.25.
    const int k = 8;
    tdrm::TdrmParams tdrm_params =
        tdrm_blob.empty()
            ? random_tdrm_params(k, 8, layout.fm_channels, layout.classes, seed + 1)
            : io::load_tdrm_params(tdrm_blob);
    {
        tdrm::TdrmParams zeroed = tdrm_params;
        std::fill(zeroed.fc.weights.begin(), zeroed.fc.weights.end(), 0.0f);
        zeroed.fc.bias = 0.0f;
        std::fill(zeroed.fs.weights.begin(), zeroed.fs.weights.end(), 0.0f);
        std::fill(zeroed.fs.bias.begin(), zeroed.fs.bias.end(), 0.0f);
        const tdrm::TopKPicks picks = tdrm::pick_topk(prev.hm, prev.idmap, k);
        const FeatureMap m = tdrm::correlation(picks, boosted);
        const FeatureMap m_r = conv2d(m, zeroed.reduce);
        const FeatureMap gated = tdrm::max_csam(m, zeroed);
        float worst = 0.0f;
        for (std::size_t i = 0; i < gated.values.size(); ++i)
            worst = std::max(worst, std::abs(gated.values[i] - 0.25f * m_r.values[i]));
        add("tdrm quarter gate", worst <= 1e-6f, "max dev " + std::to_string(worst));
    }
    const FeatureMap refined =
        tdrm::tdrm_forward(prev.hm, prev.idmap, boosted, curr.fm, k, tdrm_params);
    {
        bool in_range = true;
        for (float v : refined.values) in_range = in_range && v > 0.0f && v < 1.0f;
        add("tdrm output in (0,1)", in_range);
    }
    {
        const FeatureMap flat(1, 4, 4, 0.5f);
        const FeatureMap ones_id(3, 4, 4, 1.0f);
        const tdrm::TopKPicks picks = tdrm::pick_topk(flat, ones_id, 5);
        bool ok = true;
        for (int i = 0; i < 5; ++i) ok = ok && picks.indices[i] == i && picks.scores[i] == 0.5f;
        add("topk tie rule", ok);
    }

    // Loss examples with known closed forms.
    {
        FeatureMap pred(1, 1, 1, 0.5f);
        losses::HeatTarget target;
        target.map = FeatureMap(1, 1, 1, 1.0f);
        target.positives = {{0, 0, 0}};
        const auto r = losses::focal_heat_loss(pred, target);
        add("focal positive value", close_rel(static_cast<float>(r.loss), 0.17328680, 1e-5),
            std::to_string(r.loss));
    }
    {
        losses::IdTarget idt;
        idt.centers = {{0, 0}};
        idt.labels = {0};
        idt.classifier_w = Matrix(4, 2, 0.0f);
        idt.classifier_b.assign(4, 0.0f);
        FeatureMap id_map(2, 1, 1, 0.3f);
        const auto r = losses::reid_ce_loss(id_map, idt);
        add("reid uniform logits", close_rel(static_cast<float>(r.loss), std::log(4.0), 1e-6),
            std::to_string(r.loss));
    }
    {
        const auto r = losses::total_loss({1.0, 0.5, 0.25, 0.25}, {0.7, 0.3}, {0.0, 0.0});
        add("total loss at beta 0", std::abs(r.loss - 0.5 * 3.0) < 1e-12);
    }

    if (!dump_dir.empty()) {
        io::TensorContainer dump;
        dump["id_prev"] = io::NamedTensor::from_map(prev.idmap);
        dump["id_curr"] = io::NamedTensor::from_map(curr.idmap);
        dump["hm_prev"] = io::NamedTensor::from_map(prev.hm);
        dump["fm_curr"] = io::NamedTensor::from_map(curr.fm);
        const std::vector<float> query = tebm::query_pool(prev.idmap);
        const FeatureMap w_c = tebm::salient_attention(query, curr.idmap);
        dump["tebm.query"] = io::NamedTensor::from_vector(query);
        dump["tebm.attention"] = io::NamedTensor::from_map(w_c);
        dump["tebm.descriptor"] =
            io::NamedTensor::from_vector(tebm::channel_descriptor(curr.idmap, w_c, tebm_params));
        dump["tebm.boosted"] = io::NamedTensor::from_map(boosted);
        const tdrm::TopKPicks picks = tdrm::pick_topk(prev.hm, prev.idmap, k);
        const FeatureMap m = tdrm::correlation(picks, boosted);
        dump["tdrm.correlation"] = io::NamedTensor::from_map(m);
        dump["tdrm.gated"] = io::NamedTensor::from_map(tdrm::max_csam(m, tdrm_params));
        dump["tdrm.refined"] = io::NamedTensor::from_map(refined);
        io::write_tensors(fs::path(dump_dir) / "modules_dump.stct", dump);
        io::save_tebm_params(fs::path(dump_dir) / "tebm_params.stct", tebm_params);
        io::save_tdrm_params(fs::path(dump_dir) / "tdrm_params.stct", tdrm_params);
    }

    bool all_ok = true;
    for (const Check& c : checks) {
        all_ok = all_ok && c.ok;
        std::cout << (c.ok ? "   ok " : " FAIL ") << c.name
                  << (c.detail.empty() ? "" : "  (" + c.detail + ")") << "\n";
    }
    std::cout << (all_ok ? "all module checks passed\n" : "module checks FAILED\n");
    return all_ok ? 0 : 2;
}

// ---- bench ----------------------------------------------------------------

template <typename F>
double time_ms(int iters, F&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < iters; ++i) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / iters;
}

int cmd_bench(int iters, bool full) {
    const int dim = full ? 128 : 16;
    const int h = full ? 152 : 16;
    const int w = full ? 272 : 24;
    const int fm_ch = full ? 64 : 16;
    const int k = full ? 100 : 10;
    Rng rng(7);

    const auto rand_map = [&](int c, int hh, int ww) {
        FeatureMap m(c, hh, ww);
        for (float& v : m.values) v = static_cast<float>(rng.normal());
        return m;
    };

    const FeatureMap id_prev = rand_map(dim, h, w);
    const FeatureMap id_curr = rand_map(dim, h, w);
    const FeatureMap hm_prev = rand_map(1, h, w);
    const FeatureMap fm_curr = rand_map(fm_ch, h, w);
    const tebm::TebmParams tp = random_tebm_params(dim, 1);
    const tdrm::TdrmParams dp = random_tdrm_params(k, 32, fm_ch, 2, 2, full ? 64 : 32);

    std::printf("%-28s %10s\n", "operation", "ms/iter");
    std::printf("%-28s %10.3f\n", "tebm_forward",
                time_ms(iters, [&] { tebm::tebm_forward({id_prev, id_curr}, tp); }));
    std::printf("%-28s %10.3f\n", "tdrm_forward", time_ms(iters, [&] {
                    tdrm::tdrm_forward(hm_prev, id_prev, id_curr, fm_curr, k, dp);
                }));
    std::printf("%-28s %10.3f\n", "pick_topk",
                time_ms(iters, [&] { tdrm::pick_topk(hm_prev, id_prev, k); }));
    {
        assoc::CostMatrix cost(50, 50);
        for (double& v : cost.values) v = rng.uniform();
        std::printf("%-28s %10.3f\n", "hungarian 50x50",
                    time_ms(iters, [&] { assoc::hungarian(cost); }));
    }
    {
        synth::SceneConfig sc;
        sc.num_targets = 20;
        sc.num_frames = 100;
        sc.seed = 3;
        const synth::GroundTruth gt = synth::generate_scene(sc);
        const auto protos = synth::make_prototypes(gt, 32);
        synth::CorruptionConfig cc;
        cc.seed = 4;
        const auto dets = synth::corrupt(gt, cc, protos);
        std::vector<std::vector<assoc::Detection>> frames;
        for (const auto& [f, v] : dets) frames.push_back(v);
        std::printf("%-28s %10.3f\n", "tracker 100f x 20 targets",
                    time_ms(std::max(1, iters / 4), [&] {
                        assoc::run_sequence(frames, assoc::TrackerConfig{});
                    }));

        metrics::FrameBoxes gt_boxes;
        for (const auto& [f, v] : gt) gt_boxes[f] = v;
        std::printf("%-28s %10.3f\n", "clear_mot 100 frames",
                    time_ms(iters, [&] { metrics::clear_mot(gt_boxes, gt_boxes, {}); }));
    }
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"spatio-temporal multi-object tracking toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir, det_path, emb_path, output, gt_path, results_path;
    std::string report_path, dump_dir, tebm_blob, tdrm_blob;
    std::uint64_t seed = 0;
    bool has_seed = false;
    double iou_min = 0.5;
    bool single_class = false;
    int jobs = 0, iters = 20;
    bool full = false;

    CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic scene: gt, detections, embeddings");
    synth_cmd->add_option("-c,--config", config_path, "run config (JSON)");
    synth_cmd->add_option("--seed", seed, "override the scene seed");
    synth_cmd->add_option("-o,--out", out_dir, "output directory");

    CLI::App* track_cmd = app.add_subcommand("track", "run the online tracker over detections");
    track_cmd->add_option("-d,--detections", det_path, "detection file or directory")->required();
    track_cmd->add_option("-e,--embeddings", emb_path, "embedding sidecar file or directory");
    track_cmd->add_option("-c,--config", config_path, "run config (JSON)");
    track_cmd->add_option("-o,--output", output, "results file or directory")->required();
    track_cmd->add_option("-j,--jobs", jobs, "parallel workers in directory mode");

    CLI::App* eval_cmd = app.add_subcommand("eval", "score results against ground truth");
    eval_cmd->add_option("-g,--gt", gt_path, "ground-truth file or directory")->required();
    eval_cmd->add_option("-r,--results", results_path, "results file or directory")->required();
    eval_cmd->add_option("--iou", iou_min, "match threshold (default 0.5)");
    eval_cmd->add_flag("--single-class", single_class, "ignore class ids when matching");
    eval_cmd->add_option("--report", report_path, "also write the table to this file");

    CLI::App* modules_cmd = app.add_subcommand("modules", "run module self-tests on rendered maps");
    modules_cmd->add_option("--dump", dump_dir, "dump intermediate tensors to this directory");
    modules_cmd->add_option("--seed", seed, "self-test seed");
    modules_cmd->add_option("--tebm-params", tebm_blob, "load embedding-boost parameters from a container");
    modules_cmd->add_option("--tdrm-params", tdrm_blob, "load refinement parameters from a container");

    CLI::App* bench_cmd = app.add_subcommand("bench", "time the core operations");
    bench_cmd->add_option("--iters", iters, "iterations per op (default 20)");
    bench_cmd->add_flag("--full", full, "full-scale 152x272 maps instead of desk scale");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    has_seed = synth_cmd->count("--seed") > 0;
    try {
        if (synth_cmd->parsed()) return cmd_synth(config_path, seed, has_seed, out_dir);
        if (track_cmd->parsed()) return cmd_track(det_path, emb_path, config_path, output, jobs);
        if (eval_cmd->parsed())
            return cmd_eval(gt_path, results_path, iou_min, single_class, report_path);
        if (modules_cmd->parsed()) return cmd_modules(dump_dir, seed, tebm_blob, tdrm_blob);
        if (bench_cmd->parsed()) return cmd_bench(iters, full);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace skymot
