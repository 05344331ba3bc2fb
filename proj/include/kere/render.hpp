#pragma once

#include <string>
#include <vector>

#include "kere/surface.hpp"

namespace kere {

/// Chart projection into the unit square used by the plotters.
Vec2 project_unit(const SurfacePoint& p);

/// Tiny SVG builder with fixed-format coordinates.
class SvgCanvas {
public:
    SvgCanvas(int width, int height);

    /// Polyline in unit coordinates; seam-crossing segments are split.
    void polyline_unit(const std::vector<Vec2>& pts, const std::string& color,
                       double stroke = 1.0, bool split_jumps = true);
    void dot_unit(Vec2 p, double radius_px, const std::string& color);
    void rect_unit(Vec2 lo, Vec2 size, const std::string& color);
    void text(double x_px, double y_px, const std::string& s);
    std::string str() const;

private:
    Vec2 to_px(Vec2 unit) const;
    int w_, h_;
    std::string body_;
};

/// Self-contained RGB8 PNG writer (stored deflate blocks, no compression
/// dependency).
void write_png_rgb(const std::string& path, int width, int height,
                   const std::vector<unsigned char>& rgb);

/// Pixel raster helper for point/polyline plots.
struct Raster {
    int w, h;
    std::vector<unsigned char> rgb;

    Raster(int width, int height, unsigned char bg = 255);
    void set_unit(Vec2 p, unsigned char r, unsigned char g, unsigned char b);
    void line_unit(Vec2 from, Vec2 to, unsigned char r, unsigned char g, unsigned char b);
};

}  // namespace kere
