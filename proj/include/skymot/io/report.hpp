#pragma once

#include <string>

#include "skymot/metrics.hpp"

namespace skymot::io {

// Aligned per-sequence + aggregate table:
//   Seq IDF1 MOTA MT ML FP FN IDS IDP IDR Prcn Rcll
// Rates as percentages with one decimal; undefined MOTA prints "n/a".
std::string format_report(const metrics::MetricsReport& report);

}  // namespace skymot::io
