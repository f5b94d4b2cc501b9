#pragma once

// Self-contained SVG emitters for the two figures the tool produces: the
// ordered occupancy matrix with degree overlays and the ROC curve. Every
// figure has a CSV twin, so nothing ever parses these files back.

#include "nestkit/linkpred.hpp"
#include "nestkit/ranking.hpp"

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace nestkit {
namespace svgplot {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

// Occupancy dot plot, best-ranked row at the top, best-ranked column at
// the left. The staircase overlays trace the per-row degree (share of
// columns covered) and the per-column degree (share of rows covered).
inline std::string ordered_matrix_svg(const OrderedMatrix& om, const std::string& title) {
    const double margin = 60, plot = 640;
    const double width = margin * 2 + plot, height = margin * 2 + plot + 20;
    const std::size_t nr = om.occupancy.rows, nc = om.occupancy.cols;
    const double cw = plot / static_cast<double>(nc);
    const double ch = plot / static_cast<double>(nr);

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width)
        << "\" height=\"" << num(height) << "\" viewBox=\"0 0 " << num(width) << " "
        << num(height) << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << num(margin) << "\" y=\"" << num(margin - 20)
        << "\" font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
    out << "<rect x=\"" << num(margin) << "\" y=\"" << num(margin) << "\" width=\""
        << num(plot) << "\" height=\"" << num(plot)
        << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";

    out << "<g fill=\"#1f3b73\">\n";
    for (std::size_t r = 0; r < nr; ++r)
        for (std::size_t c = 0; c < nc; ++c)
            if (om.occupancy.test(r, c))
                out << "<rect x=\"" << num(margin + static_cast<double>(c) * cw) << "\" y=\""
                    << num(margin + static_cast<double>(r) * ch) << "\" width=\""
                    << num(cw > 1 ? cw : 1) << "\" height=\"" << num(ch > 1 ? ch : 1)
                    << "\"/>\n";
    out << "</g>\n";

    out << "<polyline fill=\"none\" stroke=\"#d95f02\" stroke-width=\"1.5\" points=\"";
    for (std::size_t r = 0; r < nr; ++r) {
        const double x =
            margin + plot * static_cast<double>(om.row_degrees[r]) / static_cast<double>(nc);
        out << num(x) << "," << num(margin + static_cast<double>(r) * ch) << " " << num(x)
            << "," << num(margin + static_cast<double>(r + 1) * ch) << " ";
    }
    out << "\"/>\n";

    out << "<polyline fill=\"none\" stroke=\"#1b9e77\" stroke-width=\"1.5\" points=\"";
    for (std::size_t c = 0; c < nc; ++c) {
        const double y =
            margin + plot * static_cast<double>(om.col_degrees[c]) / static_cast<double>(nr);
        out << num(margin + static_cast<double>(c) * cw) << "," << num(y) << " "
            << num(margin + static_cast<double>(c + 1) * cw) << "," << num(y) << " ";
    }
    out << "\"/>\n";

    out << "<text x=\"" << num(margin) << "\" y=\"" << num(margin + plot + 18)
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#d95f02\">row degree"
        << "</text>\n";
    out << "<text x=\"" << num(margin + 110) << "\" y=\"" << num(margin + plot + 18)
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#1b9e77\">column degree"
        << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

inline std::string roc_svg(const RocResult& roc, const std::string& title) {
    const double margin = 60, plot = 480;
    const double width = margin * 2 + plot, height = margin * 2 + plot;

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width)
        << "\" height=\"" << num(height) << "\" viewBox=\"0 0 " << num(width) << " "
        << num(height) << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << num(margin) << "\" y=\"" << num(margin - 20)
        << "\" font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
    out << "<rect x=\"" << num(margin) << "\" y=\"" << num(margin) << "\" width=\""
        << num(plot) << "\" height=\"" << num(plot)
        << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << num(margin) << "\" y1=\"" << num(margin + plot) << "\" x2=\""
        << num(margin + plot) << "\" y2=\"" << num(margin)
        << "\" stroke=\"#bbb\" stroke-dasharray=\"4 4\"/>\n";

    out << "<polyline fill=\"none\" stroke=\"#1f3b73\" stroke-width=\"2\" points=\"";
    for (const auto& p : roc.points)
        out << num(margin + plot * p.fpr) << "," << num(margin + plot * (1.0 - p.tpr)) << " ";
    out << "\"/>\n";

    char auc[64];
    std::snprintf(auc, sizeof auc, "AUC = %.4f", roc.auc);
    out << "<text x=\"" << num(margin + plot - 130) << "\" y=\"" << num(margin + plot - 15)
        << "\" font-family=\"sans-serif\" font-size=\"14\">" << auc << "</text>\n";
    out << "<text x=\"" << num(margin + plot / 2 - 60) << "\" y=\""
        << num(margin + plot + 35)
        << "\" font-family=\"sans-serif\" font-size=\"13\">false positive rate</text>\n";
    out << "<text x=\"" << num(margin - 45) << "\" y=\"" << num(margin + plot / 2)
        << "\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 "
        << num(margin - 45) << " " << num(margin + plot / 2)
        << ")\">true positive rate</text>\n";
    out << "</svg>\n";
    return out.str();
}

}  // namespace svgplot
}  // namespace nestkit
