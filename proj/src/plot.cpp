#include <fmt/format.h>

#include <algorithm>
#include <ostream>
#include <string>

#include "proposalbench/errors.hpp"
#include "proposalbench/evaluation.hpp"

namespace proposalbench {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string_view method_color(Method m) {
    switch (m) {
        case Method::SelectiveSearch: return "#1f77b4";
        case Method::EdgeBoxes: return "#d62728";
        case Method::Combination: return "#2ca02c";
    }
    return "#000000";
}

std::string_view axis_label(Sweep s) {
    switch (s) {
        case Sweep::Viewpoint: return "camera displacement (cm)";
        case Sweep::Illumination: return "camera displacement (cm), night illumination";
        case Sweep::Size: return "object size rank (largest first)";
    }
    return "";
}

std::string escape_xml(std::string_view text) {
    std::string out;
    for (char c : text) {
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

}  // namespace

void render_svg_plot(const std::vector<QualityCurve>& curves, std::string_view title, std::ostream& out) {
    if (curves.empty()) throw ParameterError("nothing to plot");
    const Sweep sweep = curves.front().sweep;
    for (const QualityCurve& c : curves) {
        if (c.sweep != sweep) throw ParameterError("cannot plot curves from different sweeps");
    }

    std::vector<double> xs;
    for (const QualityCurve& c : curves) {
        for (const QualityPoint& p : c.points) xs.push_back(p.x);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    const double x_min = xs.empty() ? 0.0 : xs.front();
    const double x_max = xs.empty() ? 1.0 : xs.back();

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto px = [&](double x) {
        if (x_max == x_min) return kLeft + plot_w / 2.0;
        return kLeft + (x - x_min) / (x_max - x_min) * plot_w;
    };
    auto py = [&](double q) { return kTop + (1.0 - q) * plot_h; };

    out << fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
        "viewBox=\"0 0 {:.0f} {:.0f}\" font-family=\"sans-serif\" font-size=\"12\">\n",
        kWidth, kHeight, kWidth, kHeight);
    out << fmt::format("<rect width=\"{:.0f}\" height=\"{:.0f}\" fill=\"#ffffff\"/>\n", kWidth, kHeight);
    out << fmt::format("<text x=\"{:.2f}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                       kLeft + plot_w / 2.0, escape_xml(title));

    for (int i = 0; i <= 5; ++i) {
        const double q = i / 5.0;
        out << fmt::format(
            "<line class=\"grid\" x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" "
            "stroke=\"#dddddd\"/>\n",
            kLeft, py(q), kLeft + plot_w, py(q));
        out << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.1f}</text>\n",
                           kLeft - 6.0, py(q) + 4.0, q);
    }
    for (double x : xs) {
        out << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", px(x),
                           kTop + plot_h + 16.0, format_coordinate(x));
    }
    out << fmt::format(
        "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
        "stroke=\"#000000\"/>\n",
        kLeft, kTop, plot_w, plot_h);
    out << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n",
                       kLeft + plot_w / 2.0, kHeight - 16.0, escape_xml(axis_label(sweep)));
    out << fmt::format(
        "<text x=\"18\" y=\"{:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2f})\">"
        "mean best IOU</text>\n",
        kTop + plot_h / 2.0, kTop + plot_h / 2.0);

    for (std::size_t i = 0; i < curves.size(); ++i) {
        const QualityCurve& c = curves[i];
        std::string points;
        for (const QualityPoint& p : c.points) {
            if (!points.empty()) points += ' ';
            points += fmt::format("{:.2f},{:.2f}", px(p.x), py(p.quality));
        }
        out << fmt::format(
            "<polyline data-method=\"{}\" points=\"{}\" fill=\"none\" stroke=\"{}\" "
            "stroke-width=\"2\"/>\n",
            method_name(c.method), points, method_color(c.method));
        for (const QualityPoint& p : c.points) {
            out << fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n", px(p.x),
                               py(p.quality), method_color(c.method));
        }

        const double ly = kTop + 14.0 + 20.0 * static_cast<double>(i);
        const double lx = kLeft + plot_w + 16.0;
        out << fmt::format(
            "<g class=\"legend\"><line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" "
            "stroke=\"{}\" stroke-width=\"2\"/><text x=\"{:.2f}\" y=\"{:.2f}\">{}</text></g>\n",
            lx, ly, lx + 24.0, ly, method_color(c.method), lx + 30.0, ly + 4.0, method_name(c.method));
    }
    out << "</svg>\n";
    if (!out) throw IoError("write failed");
}

}  // namespace proposalbench
