#include "cemech/plot.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <stdexcept>

#include <fmt/format.h>

#include "cemech/io.hpp"

namespace cemech::plot {

namespace {

constexpr std::array<const char*, 6> palette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};
constexpr std::array<std::array<unsigned char, 3>, 6> palette_rgb = {
    {{31, 119, 180}, {214, 39, 40}, {44, 160, 44}, {148, 103, 189}, {255, 127, 14}, {23, 190, 207}}};

struct Frame {
    double x0, x1, y0, y1;
    double left = 80, right = 20, top = 40, bottom = 60;
    int w, h;
    bool log_x, log_y;

    double tx(double v) const { return log_x ? std::log10(v) : v; }
    double ty(double v) const { return log_y ? std::log10(v) : v; }
    double px(double v) const { return left + (tx(v) - x0) / (x1 - x0) * (w - left - right); }
    double py(double v) const { return h - bottom - (ty(v) - y0) / (y1 - y0) * (h - top - bottom); }
    bool usable(double x, double y) const
    {
        return std::isfinite(x) && std::isfinite(y) && (!log_x || x > 0.0) && (!log_y || y > 0.0);
    }
};

Frame make_frame(const Figure& fig)
{
    Frame f{};
    f.w = fig.width;
    f.h = fig.height;
    f.log_x = fig.log_x;
    f.log_y = fig.log_y;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto& s : fig.series) {
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!f.usable(s.x[i], s.y[i])) {
                continue;
            }
            xmin = std::min(xmin, f.tx(s.x[i]));
            xmax = std::max(xmax, f.tx(s.x[i]));
            ymin = std::min(ymin, f.ty(s.y[i]));
            ymax = std::max(ymax, f.ty(s.y[i]));
        }
    }
    if (!std::isfinite(xmin)) {
        xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    }
    if (xmax == xmin) {
        xmax = xmin + 1;
    }
    if (ymax == ymin) {
        ymax = ymin + 1;
    }
    const double pad = 0.05 * (ymax - ymin);
    f.x0 = xmin;
    f.x1 = xmax;
    f.y0 = ymin - pad;
    f.y1 = ymax + pad;
    return f;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string tick_label(double v, bool log)
{
    return log ? fmt::format("1e{:.0f}", v) : fmt::format("{:.4g}", v);
}

} // namespace

std::string render_svg(const Figure& fig)
{
    const Frame f = make_frame(fig);
    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        f.w, f.h);
    const double pw = f.w - f.left - f.right;
    const double ph = f.h - f.top - f.bottom;
    out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", f.left,
                       f.top, pw, ph);
    for (int k = 0; k <= 4; ++k) {
        const double xv = f.x0 + (f.x1 - f.x0) * k / 4.0;
        const double yv = f.y0 + (f.y1 - f.y0) * k / 4.0;
        const double x = f.left + pw * k / 4.0;
        const double y = f.h - f.bottom - ph * k / 4.0;
        out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n", x,
                           f.h - f.bottom + 16, tick_label(xv, f.log_x));
        out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
                           f.left - 6, y + 4, tick_label(yv, f.log_y));
    }
    out += fmt::format("<text x=\"{:.1f}\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
                       f.left + pw / 2, escape(fig.title));
    out += fmt::format("<text x=\"{:.1f}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
                       f.left + pw / 2, f.h - 16, escape(fig.xlabel));
    out += fmt::format("<text x=\"16\" y=\"{:.1f}\" font-size=\"12\" text-anchor=\"middle\" "
                       "transform=\"rotate(-90 16 {:.1f})\">{}</text>\n",
                       f.top + ph / 2, f.top + ph / 2, escape(fig.ylabel));
    for (std::size_t k = 0; k < fig.series.size(); ++k) {
        const auto& s = fig.series[k];
        const char* color = palette[k % palette.size()];
        std::string pts;
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!f.usable(s.x[i], s.y[i])) {
                continue;
            }
            if (s.markers) {
                out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"{}\"/>\n", f.px(s.x[i]),
                                   f.py(s.y[i]), color);
            } else {
                pts += fmt::format("{:.2f},{:.2f} ", f.px(s.x[i]), f.py(s.y[i]));
            }
        }
        if (!pts.empty()) {
            out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.2\" points=\"{}\"/>\n", color,
                               pts);
        }
        if (!s.label.empty()) {
            out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"11\" fill=\"{}\">{}</text>\n",
                               f.left + 8, f.top + 14 + 14.0 * static_cast<double>(k), color, escape(s.label));
        }
    }
    out += "</svg>\n";
    return out;
}

void write_svg(const std::filesystem::path& path, const Figure& fig)
{
    io::write_file(path, render_svg(fig));
}

void write_png(const std::filesystem::path& path, const Figure& fig)
{
    const Frame f = make_frame(fig);
    const auto w = static_cast<std::size_t>(f.w);
    const auto h = static_cast<std::size_t>(f.h);
    std::vector<unsigned char> img(w * h * 3, 255);
    auto set = [&](long x, long y, const std::array<unsigned char, 3>& c) {
        if (x >= 0 && y >= 0 && static_cast<std::size_t>(x) < w && static_cast<std::size_t>(y) < h) {
            std::copy(c.begin(), c.end(), img.begin() + static_cast<std::ptrdiff_t>((static_cast<std::size_t>(y) * w +
                                                                                     static_cast<std::size_t>(x)) *
                                                                                    3));
        }
    };
    auto line = [&](double xa, double ya, double xb, double yb, const std::array<unsigned char, 3>& c) {
        const double steps = std::max({std::abs(xb - xa), std::abs(yb - ya), 1.0});
        for (int i = 0; i <= static_cast<int>(steps); ++i) {
            const double t = i / steps;
            set(std::lround(xa + t * (xb - xa)), std::lround(ya + t * (yb - ya)), c);
        }
    };
    const std::array<unsigned char, 3> black{0, 0, 0};
    const double l = f.left, r = f.w - f.right, t = f.top, b = f.h - f.bottom;
    line(l, t, r, t, black);
    line(r, t, r, b, black);
    line(r, b, l, b, black);
    line(l, b, l, t, black);
    for (std::size_t k = 0; k < fig.series.size(); ++k) {
        const auto& s = fig.series[k];
        const auto& c = palette_rgb[k % palette_rgb.size()];
        bool have_prev = false;
        double px0 = 0, py0 = 0;
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!f.usable(s.x[i], s.y[i])) {
                have_prev = false;
                continue;
            }
            const double px = f.px(s.x[i]), py = f.py(s.y[i]);
            if (s.markers) {
                for (int dx = -2; dx <= 2; ++dx) {
                    for (int dy = -2; dy <= 2; ++dy) {
                        set(std::lround(px) + dx, std::lround(py) + dy, c);
                    }
                }
            } else if (have_prev) {
                line(px0, py0, px, py, c);
            }
            px0 = px;
            py0 = py;
            have_prev = true;
        }
    }

    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
    if (!fp) {
        throw std::runtime_error(fmt::format("{}: cannot open for writing", path.string()));
    }
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, nullptr);
        throw std::runtime_error("png: cannot allocate writer");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error(fmt::format("{}: png write failed", path.string()));
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (std::size_t y = 0; y < h; ++y) {
        png_write_row(png, img.data() + y * w * 3);
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace cemech::plot
