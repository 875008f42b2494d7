#include "thhcalc/chart.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "thhcalc/error.hpp"

namespace thhcalc {

namespace {

constexpr double kCell = 24.0;
constexpr double kMargin = 48.0;
constexpr double kLegend = 64.0;

struct Point {
    double x = 0;
    double y = 0;
};

class Layout {
public:
    Layout(const Window& W, int w_top) : n_min_(W.n_min), n_max_(W.n_max), w_top_(w_top) {}

    double width() const { return 2 * kMargin + (n_max_ - n_min_ + 1) * kCell; }
    double height() const { return 2 * kMargin + kLegend + (w_top_ + 1) * kCell; }

    Point center(const Bidegree& b) const
    {
        return {kMargin + (b.n - n_min_ + 0.5) * kCell, kMargin + kLegend + (w_top_ - b.w + 0.5) * kCell};
    }

    // Class i of d at b, packed in a square grid inside the cell.
    Point at(const Bidegree& b, std::size_t i, std::size_t d) const
    {
        const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));
        const double step = std::min(6.0, (kCell - 6.0) / cols);
        const int row = static_cast<int>(i) / cols, col = static_cast<int>(i) % cols;
        const Point c = center(b);
        return {c.x + (col - (cols - 1) / 2.0) * step, c.y + (row - (cols - 1) / 2.0) * step};
    }

    double radius(std::size_t d) const
    {
        const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));
        return std::max(1.0, std::min(3.0, (kCell - 6.0) / cols / 2.5));
    }

    int n_min() const { return n_min_; }
    int n_max() const { return n_max_; }
    int w_top() const { return w_top_; }

private:
    int n_min_, n_max_, w_top_;
};

std::string num(double v)
{
    return fmt::format("{:.2f}", v);
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        if (c == '<')
            out += "&lt;";
        else if (c == '>')
            out += "&gt;";
        else if (c == '&')
            out += "&amp;";
        else
            out += c;
    }
    return out;
}

}  // namespace

std::string emit_chart(const RunReport& report, int r)
{
    const PageRecord* page = report.page(r);
    if (!page)
        throw Error(fmt::format("{} has no page {}", report.scenario, r));
    const Window& W = report.window;

    int w_top = 1;
    for (const auto& [b, d] : page->dims)
        w_top = std::max(w_top, b.w);
    for (const auto& [b, m] : page->differential)
        w_top = std::max(w_top, b.w + r);
    w_top = std::min(w_top, std::max(W.w_max, 1));
    const Layout L(W, w_top);

    std::string out;
    out += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n",
        num(L.width()), num(L.height()));
    out += "<style>\n"
           "  .grid { stroke: #e4e4e4; stroke-width: 1; }\n"
           "  .axis { font: 10px sans-serif; fill: #444; }\n"
           "  .legend { font: 12px sans-serif; fill: #222; }\n"
           "  .class { fill: #1f3a93; }\n"
           "  .mult { font: 8px sans-serif; fill: #b22222; }\n"
           "  .arrow { stroke: #b22222; stroke-width: 1; marker-end: url(#head); }\n"
           "</style>\n";
    out += "<defs><marker id=\"head\" viewBox=\"0 0 6 6\" refX=\"5\" refY=\"3\" markerWidth=\"5\" markerHeight=\"5\" "
           "orient=\"auto\"><path d=\"M0,0 L6,3 L0,6 z\" fill=\"#b22222\"/></marker></defs>\n";
    out += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", num(L.width()), num(L.height()));

    // Legend.
    const std::string title =
        r == 0 ? fmt::format("{}: result table, p = {}", report.scenario, report.prime)
               : fmt::format("{}: page E_{}, p = {}", report.scenario, r, report.prime);
    out += fmt::format("<text class=\"legend\" x=\"{}\" y=\"{}\">{}</text>\n", num(kMargin), num(20.0), escape(title));
    out += fmt::format("<text class=\"legend\" x=\"{}\" y=\"{}\">x: topological degree n; y: filtration weight w, "
                       "increasing upward</text>\n",
                       num(kMargin), num(36.0));
    out += fmt::format("<text class=\"legend\" x=\"{}\" y=\"{}\">dots: basis classes (count shown when above 1); "
                       "lines: nonzero entries of d_{}</text>\n",
                       num(kMargin), num(52.0), r);

    // Grid and axis labels.
    const int n_step = (L.n_max() - L.n_min()) > 40 ? 4 : 2;
    for (int n = L.n_min(); n <= L.n_max(); ++n) {
        const Point c = L.center({n, 0});
        if (n % n_step == 0) {
            out += fmt::format("<line class=\"grid\" x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\"/>\n", num(c.x),
                               num(kMargin + kLegend), num(L.height() - kMargin));
            out += fmt::format("<text class=\"axis\" x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", num(c.x),
                               num(L.height() - kMargin + 14), n);
        }
    }
    const int w_step = L.w_top() > 20 ? 4 : (L.w_top() > 8 ? 2 : 1);
    for (int w = 0; w <= L.w_top(); w += w_step) {
        const Point c = L.center({L.n_min(), w});
        out += fmt::format("<line class=\"grid\" x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\"/>\n", num(kMargin), num(c.y),
                           num(L.width() - kMargin));
        out += fmt::format("<text class=\"axis\" x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", num(kMargin - 6),
                           num(c.y + 3), w);
    }

    // Classes.
    for (const auto& [b, d] : page->dims) {
        if (b.w > L.w_top())
            continue;
        const double rad = L.radius(d);
        for (std::size_t i = 0; i < d; ++i) {
            const Point q = L.at(b, i, d);
            out += fmt::format("<circle class=\"class\" cx=\"{}\" cy=\"{}\" r=\"{}\"/>\n", num(q.x), num(q.y), num(rad));
        }
        if (d > 1) {
            const Point c = L.center(b);
            out += fmt::format("<text class=\"mult\" x=\"{}\" y=\"{}\">{}</text>\n", num(c.x + kCell / 2 - 8),
                               num(c.y - kCell / 2 + 8), d);
        }
    }

    // Differentials.
    for (const auto& [b, m] : page->differential) {
        const Bidegree t{b.n - 1, b.w + r};
        if (t.w > L.w_top())
            continue;
        const std::size_t ds = m.rows(), dt = m.cols();
        for (std::size_t i = 0; i < ds; ++i)
            for (std::size_t j = 0; j < dt; ++j) {
                if (!m.at(i, j))
                    continue;
                const Point a = L.at(b, i, ds), z = L.at(t, j, dt);
                out += fmt::format("<line class=\"arrow\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n", num(a.x),
                                   num(a.y), num(z.x), num(z.y));
            }
    }
    out += "</svg>\n";
    return out;
}

}  // namespace thhcalc
