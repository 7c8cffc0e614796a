#include "tractalign/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace tractalign {

namespace {

// Just enough SVG to cover the three report figures; no text escaping
// beyond what the fixed labels need.
class SvgWriter {
  public:
    SvgWriter(double width, double height) : w_(width), h_(height) {
        buf_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\"" << h_
             << "\" viewBox=\"0 0 " << w_ << " " << h_ << "\">\n";
        buf_ << "<rect width=\"" << w_ << "\" height=\"" << h_ << "\" fill=\"white\"/>\n";
    }

    void line(double x1, double y1, double x2, double y2, const std::string& color,
              double width = 1.0, const std::string& dash = "") {
        buf_ << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\"" << y2
             << "\" stroke=\"" << color << "\" stroke-width=\"" << width << "\"";
        if (!dash.empty()) buf_ << " stroke-dasharray=\"" << dash << "\"";
        buf_ << "/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                  double width = 1.0, double opacity = 1.0) {
        buf_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width
             << "\" stroke-opacity=\"" << opacity << "\" points=\"";
        for (const auto& [x, y] : pts) buf_ << x << ',' << y << ' ';
        buf_ << "\"/>\n";
    }

    void rect(double x, double y, double w, double h, const std::string& fill) {
        buf_ << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w << "\" height=\"" << h
             << "\" fill=\"" << fill << "\"/>\n";
    }

    void text(double x, double y, const std::string& s, int size = 12,
              const std::string& anchor = "start") {
        buf_ << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"" << size
             << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\">" << s
             << "</text>\n";
    }

    void save(const std::string& path) {
        buf_ << "</svg>\n";
        std::FILE* f = std::fopen(path.c_str(), "wb");
        if (!f) throw IoError("svg: cannot open " + path);
        const std::string s = buf_.str();
        std::fwrite(s.data(), 1, s.size(), f);
        std::fclose(f);
    }

  private:
    double w_, h_;
    std::ostringstream buf_;
};

std::string heat_color(double v) {
    // Blue -> white -> red over [0, 1].
    v = std::clamp(v, 0.0, 1.0);
    int r, g, b;
    if (v < 0.5) {
        const double f = v / 0.5;
        r = static_cast<int>(40 + f * 215);
        g = static_cast<int>(70 + f * 185);
        b = 255;
    } else {
        const double f = (v - 0.5) / 0.5;
        r = 255;
        g = static_cast<int>(255 - f * 185);
        b = static_cast<int>(255 - f * 215);
    }
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

}  // namespace

void plot_gamma_panel(const std::vector<Diffeo>& gammas, const std::string& title,
                      const std::string& path) {
    const double size = 360, margin = 40;
    SvgWriter svg(size + 2 * margin, size + 2 * margin + 20);
    const auto px = [&](double t) { return margin + t * size; };
    const auto py = [&](double g) { return margin + 20 + (1.0 - g) * size; };

    svg.text(margin, 24, title, 14);
    svg.line(px(0), py(0), px(1), py(0), "#333");
    svg.line(px(0), py(0), px(0), py(1), "#333");
    svg.line(px(0), py(0), px(1), py(1), "#888", 1.0, "5,4");
    for (const Diffeo& g : gammas) {
        std::vector<std::pair<double, double>> pts;
        const int T = g.samples();
        pts.reserve(T);
        for (int j = 0; j < T; ++j) pts.emplace_back(px(j / double(T - 1)), py(g.values(j)));
        svg.polyline(pts, "#1f77b4", 1.0, 0.55);
    }
    svg.save(path);
}

void plot_profile_heatmaps(const std::vector<Eigen::VectorXd>& before,
                           const std::vector<Eigen::VectorXd>& after, const std::string& title,
                           const std::string& path) {
    if (before.empty() || after.empty()) throw EmptySet("plot_profile_heatmaps: no profiles");
    const int n = static_cast<int>(before.size());
    const int T = static_cast<int>(before[0].size());
    double lo = before[0](0), hi = lo;
    for (const auto* set : {&before, &after})
        for (const auto& p : *set) {
            lo = std::min(lo, p.minCoeff());
            hi = std::max(hi, p.maxCoeff());
        }
    const double span = hi - lo > 1e-12 ? hi - lo : 1.0;

    const double cell_w = std::max(2.0, 420.0 / T), cell_h = std::max(2.0, 300.0 / n);
    const double panel_w = cell_w * T, panel_h = cell_h * n, margin = 40, gap = 30;
    SvgWriter svg(2 * panel_w + 2 * margin + gap, panel_h + margin + 50);
    svg.text(margin, 24, title, 14);
    svg.text(margin, 40, "before", 11);
    svg.text(margin + panel_w + gap, 40, "after", 11);
    for (int pane = 0; pane < 2; ++pane) {
        const auto& set = pane == 0 ? before : after;
        const double x0 = margin + pane * (panel_w + gap);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < T; ++j)
                svg.rect(x0 + j * cell_w, 46 + i * cell_h, cell_w + 0.5, cell_h + 0.5,
                         heat_color((set[i](j) - lo) / span));
    }
    svg.save(path);
}

void plot_hausdorff_bars(const EvalReport& report, const std::string& title,
                         const std::string& path) {
    const int n = static_cast<int>(report.rows.size());
    if (n == 0) throw EmptySet("plot_hausdorff_bars: empty report");
    double hi = 0.0;
    for (const EvalRow& r : report.rows) hi = std::max({hi, r.rigid_hausdorff, r.soft_hausdorff});
    if (hi <= 0.0) hi = 1.0;

    const double bar_w = 14, group_gap = 12, margin = 50, plot_h = 260;
    const double width = margin * 2 + n * (2 * bar_w + group_gap);
    SvgWriter svg(width, plot_h + 110);
    svg.text(margin, 24, title, 14);
    svg.text(margin, 40, "gray: rigid, blue: soft", 11);
    const double base = 50 + plot_h;
    svg.line(margin - 6, base, width - margin + 6, base, "#333");
    for (int i = 0; i < n; ++i) {
        const double x = margin + i * (2 * bar_w + group_gap);
        const double hr = plot_h * report.rows[i].rigid_hausdorff / hi;
        const double hs = plot_h * report.rows[i].soft_hausdorff / hi;
        svg.rect(x, base - hr, bar_w, hr, "#9b9b9b");
        svg.rect(x + bar_w, base - hs, bar_w, hs, "#1f77b4");
        if (n <= 24) svg.text(x + bar_w, base + 14, report.rows[i].pair_id, 9, "middle");
    }
    svg.save(path);
}

}  // namespace tractalign
