#include "skymot/io/report.hpp"

#include <algorithm>
#include <cstdio>
#include <vector>

namespace skymot::io {

namespace {

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v * 100.0);
    return buf;
}

std::string row(const metrics::SequenceMetrics& m, std::size_t name_width) {
    char buf[256];
    const std::string mota = m.mota ? pct(*m.mota) : std::string("n/a");
    std::snprintf(buf, sizeof(buf), "%-*s %6s %6s %4d %4d %6lld %6lld %5lld %6s %6s %6s %6s",
                  static_cast<int>(name_width), m.name.c_str(), pct(m.idf1).c_str(), mota.c_str(),
                  m.mt, m.ml, m.fp, m.fn, m.ids, pct(m.idp).c_str(), pct(m.idr).c_str(),
                  pct(m.precision).c_str(), pct(m.recall).c_str());
    return buf;
}

}  // namespace

std::string format_report(const metrics::MetricsReport& report) {
    std::size_t name_width = 7;
    for (const auto& m : report.per_sequence) name_width = std::max(name_width, m.name.size());
    name_width = std::min<std::size_t>(name_width, 40);

    char header[256];
    std::snprintf(header, sizeof(header), "%-*s %6s %6s %4s %4s %6s %6s %5s %6s %6s %6s %6s",
                  static_cast<int>(name_width), "Seq", "IDF1", "MOTA", "MT", "ML", "FP", "FN",
                  "IDS", "IDP", "IDR", "Prcn", "Rcll");
    std::string out = header;
    out += '\n';
    for (const auto& m : report.per_sequence) {
        out += row(m, name_width);
        out += '\n';
    }
    if (report.per_sequence.size() != 1 || report.per_sequence[0].name != report.aggregate.name) {
        out += row(report.aggregate, name_width);
        out += '\n';
    }
    return out;
}

}  // namespace skymot::io
