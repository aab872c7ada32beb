#include "coderag/charts.hpp"

#include "coderag/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

namespace coderag {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 60;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string tick_label(double x) {
    char buf[64];
    if (std::abs(x - std::round(x)) < 1e-9) {
        std::snprintf(buf, sizeof buf, "%.0f", x);
    } else {
        std::snprintf(buf, sizeof buf, "%.2f", x);
    }
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo, hi;
};

Range padded(double lo, double hi) {
    if (hi - lo < 1e-12) {
        const double pad = std::max(1.0, std::abs(lo) * 0.1);
        return {lo - pad, hi + pad};
    }
    return {lo, hi};
}

} // namespace

std::string render_svg(const LineChart& chart) {
    if (chart.series.empty()) throw DataError("chart '" + chart.title + "' has no series");
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& s : chart.series) {
        if (s.points.size() < 2) {
            throw DataError("series '" + s.label + "' of chart '" + chart.title + "' needs at least 2 points");
        }
        for (auto [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) throw DataError("non-finite point in chart '" + chart.title + "'");
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    ymin = std::min(ymin, 0.0);
    const Range xr = padded(xmin, xmax), yr = padded(ymin, ymax);
    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double y) { return kTop + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
           "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + num(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
           escape(chart.title) + "</text>\n";
    // axes
    svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop + ph) + "\" x2=\"" + num(kLeft + pw) + "\" y2=\"" +
           num(kTop + ph) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) + "\" y2=\"" + num(kTop + ph) +
           "\" stroke=\"black\"/>\n";
    constexpr int kTicks = 5;
    for (int i = 0; i <= kTicks; ++i) {
        const double xv = xr.lo + (xr.hi - xr.lo) * i / kTicks;
        const double yv = yr.lo + (yr.hi - yr.lo) * i / kTicks;
        svg += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(kTop + ph + 18) + "\" text-anchor=\"middle\">" +
               tick_label(xv) + "</text>\n";
        svg += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(py(yv) + 4) + "\" text-anchor=\"end\">" +
               tick_label(yv) + "</text>\n";
        svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(py(yv)) + "\" x2=\"" + num(kLeft + pw) + "\" y2=\"" +
               num(py(yv)) + "\" stroke=\"#dddddd\"/>\n";
    }
    svg += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 15) + "\" text-anchor=\"middle\">" +
           escape(chart.x_label) + "</text>\n";
    svg += "<text x=\"18\" y=\"" + num(kTop + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
           num(kTop + ph / 2) + ")\">" + escape(chart.y_label) + "</text>\n";

    for (std::size_t i = 0; i < chart.series.size(); ++i) {
        const auto& s = chart.series[i];
        const std::string color = kColors[i % std::size(kColors)];
        std::string pts;
        for (auto [x, y] : s.points) {
            if (!pts.empty()) pts += ' ';
            pts += num(px(x)) + "," + num(py(y));
        }
        svg += "<polyline class=\"series\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\" points=\"" + pts +
               "\"/>\n";
        for (auto [x, y] : s.points) {
            svg += "<circle class=\"marker\" cx=\"" + num(px(x)) + "\" cy=\"" + num(py(y)) + "\" r=\"3.5\" fill=\"" +
                   color + "\"/>\n";
        }
        const double ly = kTop + 10 + 18.0 * static_cast<double>(i);
        svg += "<line x1=\"" + num(kLeft + pw + 15) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(kLeft + pw + 35) +
               "\" y2=\"" + num(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + num(kLeft + pw + 40) + "\" y=\"" + num(ly + 4) + "\">" + escape(s.label) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

namespace {

using Extract = double (*)(const RunResult&);

std::vector<ChartSeries> group(const std::vector<const RunResult*>& runs, Extract x, Extract y) {
    std::map<std::string, std::vector<std::pair<double, double>>> by_strategy;
    for (const auto* r : runs) by_strategy[r->report.strategy].emplace_back(x(*r), y(*r));
    std::vector<ChartSeries> out;
    for (auto& [label, pts] : by_strategy) {
        std::stable_sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.first < b.first; });
        out.push_back({label, std::move(pts)});
    }
    return out;
}

std::filesystem::path write_chart(const std::filesystem::path& dir, const std::string& name, const LineChart& chart) {
    const auto svg = render_svg(chart);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << svg;
    return path;
}

} // namespace

std::vector<std::filesystem::path> emit_charts(const std::filesystem::path& dir,
                                               const std::vector<const RunResult*>& topk_runs,
                                               const std::vector<const RunResult*>& scale_runs) {
    if (topk_runs.empty() && scale_runs.empty()) throw DataError("no sweep results to chart");
    auto k = [](const RunResult& r) { return static_cast<double>(r.report.k); };
    auto em = [](const RunResult& r) { return r.report.em_pct; };
    auto tokens = [](const RunResult& r) { return r.prompt_tokens_mean; };
    auto frac = [](const RunResult& r) { return r.report.corpus_fraction; };
    std::vector<std::filesystem::path> written;
    if (!topk_runs.empty()) {
        written.push_back(write_chart(dir, "em_vs_k.svg", {"Exact match vs retrieved units", "K", "EM (%)",
                                                           group(topk_runs, k, em)}));
        written.push_back(write_chart(dir, "prompt_tokens_vs_k.svg",
                                      {"Prompt length vs retrieved units", "K", "mean prompt tokens",
                                       group(topk_runs, k, tokens)}));
    }
    if (!scale_runs.empty()) {
        written.push_back(write_chart(dir, "em_vs_fraction.svg", {"Exact match vs corpus size", "corpus fraction",
                                                                  "EM (%)", group(scale_runs, frac, em)}));
    }
    return written;
}

} // namespace coderag
