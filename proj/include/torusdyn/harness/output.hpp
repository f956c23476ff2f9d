#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "torusdyn/geometry.hpp"

namespace torusdyn::harness {

/// 64-bit FNV-1a of the bytes, as 16 lowercase hex digits.
std::string fnv1a64_hex(std::string_view bytes);

/// Shortest round-trip decimal form of v.
std::string num(double v);

/// Files produced by a run, held in memory until the run has finished so a
/// failing run leaves nothing behind.
class OutputSet {
public:
    void add(const std::string& name, std::string content);
    const std::map<std::string, std::string>& files() const { return files_; }
    bool empty() const { return files_.empty(); }

private:
    std::map<std::string, std::string> files_;
};

/// Writes every file plus manifest.json into dir (created if needed).
void write_outputs(const std::string& dir, const OutputSet& outputs, const std::string& manifest);

/// CSV with a fixed header; cells are written as given.
class Csv {
public:
    explicit Csv(std::vector<std::string> header);
    void row(const std::vector<std::string>& cells);
    std::string str() const { return text_; }

private:
    std::size_t columns_;
    std::string text_;
};

/// Minimal SVG canvas in world coordinates (y up).
class Svg {
public:
    Svg(const Box& world, int width_px = 640, int height_px = 640);

    void polyline(const std::vector<Vec2>& pts, std::string_view color, double width = 1.0,
                  std::string_view dash = {});
    void polygon(const std::vector<Vec2>& pts, std::string_view stroke, std::string_view fill, double opacity = 1.0);
    void circle(const Vec2& c, double radius_px, std::string_view fill);
    void rect(const Vec2& lo, const Vec2& hi, std::string_view fill, double opacity = 1.0);
    void text(const Vec2& at, std::string_view label, int size_px = 12);
    void axes();
    std::string str() const;

private:
    double px(double x) const;
    double py(double y) const;
    Box world_;
    int w_;
    int h_;
    std::string body_;
};

}  // namespace torusdyn::harness
