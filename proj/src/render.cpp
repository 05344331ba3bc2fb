#include "kere/render.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace kere {

Vec2 project_unit(const SurfacePoint& p) {
    switch (p.surface) {
        case Surface::Sphere: {
            double u = std::atan2(p.y(), p.x()) / (2.0 * M_PI) + 0.5;
            double v = std::acos(std::clamp(p.z(), -1.0, 1.0)) / M_PI;
            return Vec2{u, v};
        }
        case Surface::Torus:
            return Vec2{p.s(), p.t()};
        case Surface::Klein:
            return Vec2{2.0 * p.s(), p.t()};
        case Surface::Annulus:
            return Vec2{(p.s() + 1.0) / 2.0, p.t()};
        case Surface::MobiusStrip:
            return Vec2{p.s(), p.t()};
        case Surface::Plane:
            return Vec2{std::clamp((p.x() + 1.0) / 2.0, 0.0, 1.0),
                        std::clamp((p.y() + 1.0) / 2.0, 0.0, 1.0)};
    }
    return Vec2{0, 0};
}

namespace {

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

SvgCanvas::SvgCanvas(int width, int height) : w_(width), h_(height) {}

Vec2 SvgCanvas::to_px(Vec2 unit) const {
    return Vec2{unit[0] * w_, (1.0 - unit[1]) * h_};
}

void SvgCanvas::polyline_unit(const std::vector<Vec2>& pts, const std::string& color,
                              double stroke, bool split_jumps) {
    if (pts.size() < 2) return;
    std::string points;
    auto flush = [&]() {
        if (points.find(' ') != std::string::npos) {
            body_ += "  <polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
                     fmt6(stroke) + "\" points=\"" + points + "\"/>\n";
        }
        points.clear();
    };
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i > 0 && split_jumps) {
            if (std::fabs(pts[i][0] - pts[i - 1][0]) > 0.5 ||
                std::fabs(pts[i][1] - pts[i - 1][1]) > 0.5)
                flush();
        }
        Vec2 px = to_px(pts[i]);
        if (!points.empty()) points += ' ';
        points += fmt6(px[0]) + "," + fmt6(px[1]);
    }
    flush();
}

void SvgCanvas::dot_unit(Vec2 p, double radius_px, const std::string& color) {
    Vec2 px = to_px(p);
    body_ += "  <circle cx=\"" + fmt6(px[0]) + "\" cy=\"" + fmt6(px[1]) + "\" r=\"" +
             fmt6(radius_px) + "\" fill=\"" + color + "\"/>\n";
}

void SvgCanvas::rect_unit(Vec2 lo, Vec2 size, const std::string& color) {
    Vec2 a = to_px(Vec2{lo[0], lo[1] + size[1]});
    body_ += "  <rect x=\"" + fmt6(a[0]) + "\" y=\"" + fmt6(a[1]) + "\" width=\"" +
             fmt6(size[0] * w_) + "\" height=\"" + fmt6(size[1] * h_) + "\" fill=\"" + color +
             "\"/>\n";
}

void SvgCanvas::text(double x_px, double y_px, const std::string& s) {
    body_ += "  <text x=\"" + fmt6(x_px) + "\" y=\"" + fmt6(y_px) +
             "\" font-family=\"monospace\" font-size=\"12\">" + s + "</text>\n";
}

std::string SvgCanvas::str() const {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" "
           "width=\"" +
           std::to_string(w_) + "\" height=\"" + std::to_string(h_) + "\" viewBox=\"0 0 " +
           std::to_string(w_) + " " + std::to_string(h_) + "\">\n" + body_ + "</svg>\n";
}

namespace {

std::uint32_t crc32_of(const unsigned char* data, std::size_t len, std::uint32_t crc = 0) {
    static std::uint32_t table[256];
    static bool init = false;
    if (!init) {
        for (std::uint32_t n = 0; n < 256; ++n) {
            std::uint32_t c = n;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
            table[n] = c;
        }
        init = true;
    }
    crc ^= 0xffffffffu;
    for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ data[i]) & 0xff] ^ (crc >> 8);
    return crc ^ 0xffffffffu;
}

void push_u32(std::vector<unsigned char>& v, std::uint32_t x) {
    v.push_back((x >> 24) & 0xff);
    v.push_back((x >> 16) & 0xff);
    v.push_back((x >> 8) & 0xff);
    v.push_back(x & 0xff);
}

void push_chunk(std::vector<unsigned char>& out, const char* tag,
                const std::vector<unsigned char>& payload) {
    push_u32(out, static_cast<std::uint32_t>(payload.size()));
    std::vector<unsigned char> body(tag, tag + 4);
    body.insert(body.end(), payload.begin(), payload.end());
    out.insert(out.end(), body.begin(), body.end());
    push_u32(out, crc32_of(body.data(), body.size()));
}

}  // namespace

void write_png_rgb(const std::string& path, int width, int height,
                   const std::vector<unsigned char>& rgb) {
    if (static_cast<std::size_t>(width) * height * 3 != rgb.size())
        throw Error("write_png_rgb: buffer size mismatch");

    // raw scanlines with filter byte 0
    std::vector<unsigned char> raw;
    raw.reserve(rgb.size() + height);
    for (int y = 0; y < height; ++y) {
        raw.push_back(0);
        raw.insert(raw.end(), rgb.begin() + std::size_t(y) * width * 3,
                   rgb.begin() + std::size_t(y + 1) * width * 3);
    }

    // zlib stream made of stored deflate blocks
    std::vector<unsigned char> z;
    z.push_back(0x78);
    z.push_back(0x01);
    std::size_t pos = 0;
    while (pos < raw.size()) {
        std::size_t n = std::min<std::size_t>(65535, raw.size() - pos);
        bool final = pos + n == raw.size();
        z.push_back(final ? 1 : 0);
        z.push_back(n & 0xff);
        z.push_back((n >> 8) & 0xff);
        z.push_back(~n & 0xff);
        z.push_back((~n >> 8) & 0xff);
        z.insert(z.end(), raw.begin() + pos, raw.begin() + pos + n);
        pos += n;
    }
    std::uint32_t a = 1, b = 0;
    for (unsigned char c : raw) {
        a = (a + c) % 65521;
        b = (b + a) % 65521;
    }
    push_u32(z, (b << 16) | a);

    std::vector<unsigned char> out{0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    std::vector<unsigned char> ihdr;
    push_u32(ihdr, width);
    push_u32(ihdr, height);
    ihdr.push_back(8);   // bit depth
    ihdr.push_back(2);   // truecolor
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);
    push_chunk(out, "IHDR", ihdr);
    push_chunk(out, "IDAT", z);
    push_chunk(out, "IEND", {});

    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error("write_png_rgb: cannot open " + path);
    file.write(reinterpret_cast<const char*>(out.data()), out.size());
}

Raster::Raster(int width, int height, unsigned char bg)
    : w(width), h(height), rgb(std::size_t(width) * height * 3, bg) {}

void Raster::set_unit(Vec2 p, unsigned char r, unsigned char g, unsigned char b) {
    int x = static_cast<int>(p[0] * w);
    int y = static_cast<int>((1.0 - p[1]) * h);
    if (x < 0 || x >= w || y < 0 || y >= h) return;
    std::size_t idx = (std::size_t(y) * w + x) * 3;
    rgb[idx] = r;
    rgb[idx + 1] = g;
    rgb[idx + 2] = b;
}

void Raster::line_unit(Vec2 a, Vec2 b, unsigned char r, unsigned char g, unsigned char bl) {
    double len = std::hypot(b[0] - a[0], b[1] - a[1]);
    int steps = std::max(2, static_cast<int>(len * std::max(w, h) * 1.5));
    for (int k = 0; k <= steps; ++k) {
        double t = double(k) / steps;
        set_unit(Vec2{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])}, r, g, bl);
    }
}

}  // namespace kere
