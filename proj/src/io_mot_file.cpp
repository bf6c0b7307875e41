#include "skymot/io/mot_file.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "skymot/errors.hpp"
#include "skymot/io/atomic_file.hpp"

namespace skymot::io {

namespace {

double parse_number(const std::string& field, const std::filesystem::path& path, int line,
                    int column) {
    try {
        std::size_t used = 0;
        const double v = std::stod(field, &used);
        if (used != field.size()) throw std::invalid_argument(field);
        return v;
    } catch (const std::exception&) {
        throw FormatError(path.string() + ":" + std::to_string(line) + ": field " +
                          std::to_string(column) + ": expected a number, got '" + field + "'");
    }
}

}  // namespace

std::vector<MotLine> parse_mot_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    std::vector<MotLine> lines;
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (raw.empty()) continue;

        std::vector<std::string> fields;
        std::stringstream ss(raw);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() < 7 || fields.size() > 10)
            throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected 7-10 fields, got " +
                              std::to_string(fields.size()));

        MotLine l;
        l.frame = static_cast<int>(parse_number(fields[0], path, lineno, 1));
        l.id = static_cast<int>(parse_number(fields[1], path, lineno, 2));
        l.left = static_cast<float>(parse_number(fields[2], path, lineno, 3));
        l.top = static_cast<float>(parse_number(fields[3], path, lineno, 4));
        l.width = static_cast<float>(parse_number(fields[4], path, lineno, 5));
        l.height = static_cast<float>(parse_number(fields[5], path, lineno, 6));
        l.conf = static_cast<float>(parse_number(fields[6], path, lineno, 7));
        if (fields.size() >= 8) l.class_id = static_cast<int>(parse_number(fields[7], path, lineno, 8));
        if (fields.size() >= 9) l.visibility = static_cast<float>(parse_number(fields[8], path, lineno, 9));
        if (l.frame < 1)
            throw FormatError(path.string() + ":" + std::to_string(lineno) + ": field 1: frame must be >= 1");
        lines.push_back(l);
    }
    // Frames ascend in the output; order within a frame follows the file.
    std::stable_sort(lines.begin(), lines.end(),
                     [](const MotLine& a, const MotLine& b) { return a.frame < b.frame; });
    return lines;
}

metrics::FrameBoxes to_frame_boxes(const std::vector<MotLine>& lines) {
    metrics::FrameBoxes out;
    for (const MotLine& l : lines) {
        metrics::AnnotatedBox b;
        b.frame = l.frame;
        b.id = l.id;
        b.box = {l.left, l.top, l.width, l.height};
        b.class_id = l.class_id;
        b.conf = l.conf;
        b.visibility = l.visibility;
        out[l.frame].push_back(b);
    }
    return out;
}

std::map<int, std::vector<assoc::Detection>> to_detections(const std::vector<MotLine>& lines) {
    std::map<int, std::vector<assoc::Detection>> out;
    for (const MotLine& l : lines) {
        assoc::Detection d;
        d.box = {l.left, l.top, l.width, l.height};
        d.score = l.conf;
        d.class_id = l.class_id;
        out[l.frame].push_back(std::move(d));
    }
    return out;
}

namespace {

std::string format_line(const MotLine& l) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%d,%d,%.2f,%.2f,%.2f,%.2f,%.4f,%d,%.2f", l.frame, l.id,
                  l.left, l.top, l.width, l.height, l.conf, l.class_id, l.visibility);
    return buf;
}

}  // namespace

void write_mot_file(const std::filesystem::path& path, const std::vector<MotLine>& lines) {
    AtomicFile file(path);
    for (const MotLine& l : lines) file.stream() << format_line(l) << '\n';
    file.commit();
}

std::vector<MotLine> from_trajectories(const assoc::TrajectorySet& trajectories) {
    std::vector<MotLine> lines;
    for (const auto& [frame, records] : trajectories) {
        for (const assoc::TrackRecord& r : records) {
            MotLine l;
            l.frame = frame;
            l.id = r.track_id;
            l.left = r.box.left;
            l.top = r.box.top;
            l.width = r.box.width;
            l.height = r.box.height;
            l.conf = r.score;
            l.class_id = r.class_id;
            lines.push_back(l);
        }
    }
    return lines;
}

std::vector<MotLine> from_ground_truth(const metrics::FrameBoxes& gt) {
    std::vector<MotLine> lines;
    for (const auto& [frame, boxes] : gt) {
        for (const metrics::AnnotatedBox& b : boxes) {
            MotLine l;
            l.frame = frame;
            l.id = b.id;
            l.left = b.box.left;
            l.top = b.box.top;
            l.width = b.box.width;
            l.height = b.box.height;
            l.conf = b.conf;
            l.class_id = b.class_id;
            l.visibility = b.visibility;
            lines.push_back(l);
        }
    }
    return lines;
}

std::vector<MotLine> from_detections(const std::map<int, std::vector<assoc::Detection>>& dets) {
    std::vector<MotLine> lines;
    for (const auto& [frame, v] : dets) {
        for (const assoc::Detection& d : v) {
            MotLine l;
            l.frame = frame;
            l.id = -1;
            l.left = d.box.left;
            l.top = d.box.top;
            l.width = d.box.width;
            l.height = d.box.height;
            l.conf = d.score;
            l.class_id = d.class_id;
            lines.push_back(l);
        }
    }
    return lines;
}

}  // namespace skymot::io
