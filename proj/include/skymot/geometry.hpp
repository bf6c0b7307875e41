#pragma once

#include <algorithm>

namespace skymot {

// Axis-aligned box, top-left + size, pixels.
struct Box {
    float left = 0.0f;
    float top = 0.0f;
    float width = 0.0f;
    float height = 0.0f;

    float right() const { return left + width; }
    float bottom() const { return top + height; }
    float cx() const { return left + 0.5f * width; }
    float cy() const { return top + 0.5f * height; }
    float area() const { return width * height; }
};

inline double iou(const Box& a, const Box& b) {
    const double iw = std::min<double>(a.right(), b.right()) - std::max<double>(a.left, b.left);
    if (iw <= 0.0) return 0.0;
    const double ih = std::min<double>(a.bottom(), b.bottom()) - std::max<double>(a.top, b.top);
    if (ih <= 0.0) return 0.0;
    const double inter = iw * ih;
    return inter / (static_cast<double>(a.area()) + b.area() - inter);
}

}  // namespace skymot
