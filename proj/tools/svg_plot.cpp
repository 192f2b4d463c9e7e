#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "smica/errors.hpp"

namespace smica::cli {

namespace {

constexpr int kWidth = 900;
constexpr int kHeight = 560;
constexpr int kMarginLeft = 80;
constexpr int kMarginRight = 180;  // legend gutter
constexpr int kMarginTop = 50;
constexpr int kMarginBottom = 60;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

struct LogRange {
    double lo, hi;
    double map(double v, double pix_lo, double pix_hi) const {
        const double f = (std::log10(v) - std::log10(lo)) /
                         (std::log10(hi) - std::log10(lo));
        return pix_lo + f * (pix_hi - pix_lo);
    }
};

double clamp_positive(double v, double fallback) {
    return (std::isfinite(v) && v > 0) ? v : fallback;
}

}  // namespace

void write_convergence_svg(const std::string& path, const std::string& title,
                           const std::vector<PlotSeries>& series) {
    double tmin = 1e300, tmax = 0, vmin = 1e300, vmax = 0;
    for (const auto& s : series)
        for (std::size_t k = 0; k < s.t.size(); ++k) {
            const double t = clamp_positive(s.t[k], 1.0);
            const double lo = clamp_positive(s.mean[k] - s.stddev[k], 1e-12);
            const double hi = clamp_positive(s.mean[k] + s.stddev[k], 1e-12);
            tmin = std::min(tmin, t);
            tmax = std::max(tmax, t);
            vmin = std::min(vmin, lo);
            vmax = std::max(vmax, hi);
        }
    if (tmax <= 0 || vmax <= 0)
        throw InvalidInputError("write_convergence_svg: nothing to plot");
    if (tmin == tmax) tmax = tmin * 10;
    if (vmin == vmax) {
        vmin /= 10;
        vmax *= 10;
    }

    const LogRange xr{tmin, tmax};
    const LogRange yr{vmin, vmax};
    const double x0 = kMarginLeft, x1 = kWidth - kMarginRight;
    const double y0 = kHeight - kMarginBottom, y1 = kMarginTop;  // y grows downward

    std::ostringstream svg;
    svg << std::setprecision(6);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
        << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"28\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"18\">" << title << "</text>\n";

    // frame
    svg << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0
        << "\" height=\"" << y0 - y1 << "\" fill=\"none\" stroke=\"black\"/>\n";

    // decade grid and tick labels
    auto decades = [](double lo, double hi) {
        std::vector<double> out;
        for (int e = static_cast<int>(std::floor(std::log10(lo)));
             e <= static_cast<int>(std::ceil(std::log10(hi))); ++e) {
            const double v = std::pow(10.0, e);
            if (v >= lo * 0.999 && v <= hi * 1.001) out.push_back(v);
        }
        return out;
    };
    for (double v : decades(tmin, tmax)) {
        const double px = xr.map(v, x0, x1);
        svg << "<line x1=\"" << px << "\" y1=\"" << y1 << "\" x2=\"" << px << "\" y2=\""
            << y0 << "\" stroke=\"#dddddd\"/>\n";
        svg << "<text x=\"" << px << "\" y=\"" << y0 + 22
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">1e"
            << static_cast<int>(std::round(std::log10(v))) << "</text>\n";
    }
    for (double v : decades(vmin, vmax)) {
        const double py = yr.map(v, y0, y1);
        svg << "<line x1=\"" << x0 << "\" y1=\"" << py << "\" x2=\"" << x1 << "\" y2=\""
            << py << "\" stroke=\"#dddddd\"/>\n";
        svg << "<text x=\"" << x0 - 8 << "\" y=\"" << py + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">1e"
            << static_cast<int>(std::round(std::log10(v))) << "</text>\n";
    }
    svg << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
        << "samples t</text>\n";
    svg << "<text x=\"20\" y=\"" << (y0 + y1) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
        << "transform=\"rotate(-90 20 " << (y0 + y1) / 2 << ")\">eps_MSE</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const PlotSeries& s = series[si];
        const char* color = kPalette[si % (sizeof kPalette / sizeof *kPalette)];
        std::ostringstream pts;
        for (std::size_t k = 0; k < s.t.size(); ++k) {
            const double px = xr.map(clamp_positive(s.t[k], 1.0), x0, x1);
            const double py = yr.map(clamp_positive(s.mean[k], vmin), y0, y1);
            pts << px << ',' << py << ' ';
            if (s.stddev[k] > 0) {
                const double lo = yr.map(clamp_positive(s.mean[k] - s.stddev[k], vmin), y0, y1);
                const double hi = yr.map(clamp_positive(s.mean[k] + s.stddev[k], vmin), y0, y1);
                svg << "<line x1=\"" << px << "\" y1=\"" << lo << "\" x2=\"" << px
                    << "\" y2=\"" << hi << "\" stroke=\"" << color
                    << "\" stroke-width=\"1\" opacity=\"0.6\"/>\n";
            }
        }
        svg << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";

        const double ly = y1 + 18 + 22 * static_cast<double>(si);
        svg << "<line x1=\"" << x1 + 12 << "\" y1=\"" << ly << "\" x2=\"" << x1 + 40
            << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << x1 + 46 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"13\">" << s.label << "</text>\n";
    }
    svg << "</svg>\n";

    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path);
    out << svg.str();
}

}  // namespace smica::cli
