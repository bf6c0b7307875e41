#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "skymot/metrics.hpp"
#include "skymot/tracker.hpp"

namespace skymot::io {

// One row of the comma-separated interchange format:
//   frame,id,left,top,width,height,conf,class_id,visibility
// Writers always emit 9 fields; the parser accepts 7..10 (extras ignored).
// id is -1 for raw detections.
struct MotLine {
    int frame = 1;
    int id = -1;
    float left = 0, top = 0, width = 0, height = 0;
    float conf = 1.0f;
    int class_id = 0;
    float visibility = 1.0f;
};

std::vector<MotLine> parse_mot_file(const std::filesystem::path& path);

metrics::FrameBoxes to_frame_boxes(const std::vector<MotLine>& lines);

// Detections per frame preserving file order within a frame (the sidecar's
// det_index refers to that order). Embeddings start empty.
std::map<int, std::vector<assoc::Detection>> to_detections(const std::vector<MotLine>& lines);

// Deterministic writer: 2-decimal box coordinates, 4-decimal confidence.
// Writes to a temporary file and renames, so failures leave no partial output.
void write_mot_file(const std::filesystem::path& path, const std::vector<MotLine>& lines);

std::vector<MotLine> from_trajectories(const assoc::TrajectorySet& trajectories);
std::vector<MotLine> from_ground_truth(const metrics::FrameBoxes& gt);
std::vector<MotLine> from_detections(const std::map<int, std::vector<assoc::Detection>>& dets);

}  // namespace skymot::io
