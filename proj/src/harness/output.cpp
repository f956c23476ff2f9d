#include "torusdyn/harness/output.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace torusdyn::harness {

std::string fnv1a64_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string num(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void OutputSet::add(const std::string& name, std::string content) {
    if (name == "manifest.json" || files_.count(name)) throw std::logic_error("duplicate output file " + name);
    files_.emplace(name, std::move(content));
}

void write_outputs(const std::string& dir, const OutputSet& outputs, const std::string& manifest) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto put = [&](const std::string& name, const std::string& content) {
        std::ofstream out(fs::path(dir) / name, std::ios::binary | std::ios::trunc);
        out.write(content.data(), std::streamsize(content.size()));
        if (!out) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
    };
    for (const auto& [name, content] : outputs.files()) put(name, content);
    put("manifest.json", manifest);
}

Csv::Csv(std::vector<std::string> header) : columns_(header.size()) { row(header); }

void Csv::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw std::logic_error("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) text_ += ',';
        text_ += cells[i];
    }
    text_ += '\n';
}

namespace {

std::string f2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

Svg::Svg(const Box& world, int width_px, int height_px) : world_(world), w_(width_px), h_(height_px) {
    if (!(world.width() > 0.0) || !(world.height() > 0.0)) world_ = Box{world.xmin - 1, world.xmax + 1, world.ymin - 1, world.ymax + 1};
}

double Svg::px(double x) const { return 20.0 + (x - world_.xmin) / world_.width() * (w_ - 40); }
double Svg::py(double y) const { return 20.0 + (world_.ymax - y) / world_.height() * (h_ - 40); }

void Svg::polyline(const std::vector<Vec2>& pts, std::string_view color, double width, std::string_view dash) {
    if (pts.empty()) return;
    body_ += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"" + f2(width) + "\"";
    if (!dash.empty()) body_ += " stroke-dasharray=\"" + std::string(dash) + "\"";
    body_ += " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) body_ += ' ';
        body_ += f2(px(pts[i].x)) + "," + f2(py(pts[i].y));
    }
    body_ += "\"/>\n";
}

void Svg::polygon(const std::vector<Vec2>& pts, std::string_view stroke, std::string_view fill, double opacity) {
    if (pts.empty()) return;
    body_ += "<polygon stroke=\"" + std::string(stroke) + "\" fill=\"" + std::string(fill) + "\" fill-opacity=\"" +
             f2(opacity) + "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) body_ += ' ';
        body_ += f2(px(pts[i].x)) + "," + f2(py(pts[i].y));
    }
    body_ += "\"/>\n";
}

void Svg::circle(const Vec2& c, double radius_px, std::string_view fill) {
    body_ += "<circle cx=\"" + f2(px(c.x)) + "\" cy=\"" + f2(py(c.y)) + "\" r=\"" + f2(radius_px) + "\" fill=\"" +
             std::string(fill) + "\"/>\n";
}

void Svg::rect(const Vec2& lo, const Vec2& hi, std::string_view fill, double opacity) {
    const double x0 = px(lo.x), x1 = px(hi.x), y0 = py(hi.y), y1 = py(lo.y);
    body_ += "<rect x=\"" + f2(x0) + "\" y=\"" + f2(y0) + "\" width=\"" + f2(x1 - x0) + "\" height=\"" + f2(y1 - y0) +
             "\" fill=\"" + std::string(fill) + "\" fill-opacity=\"" + f2(opacity) + "\"/>\n";
}

void Svg::text(const Vec2& at, std::string_view label, int size_px) {
    body_ += "<text x=\"" + f2(px(at.x)) + "\" y=\"" + f2(py(at.y)) + "\" font-size=\"" + std::to_string(size_px) +
             "\" font-family=\"monospace\">" + std::string(label) + "</text>\n";
}

void Svg::axes() {
    if (world_.ymin <= 0.0 && world_.ymax >= 0.0)
        polyline({{world_.xmin, 0.0}, {world_.xmax, 0.0}}, "#999999", 0.5);
    if (world_.xmin <= 0.0 && world_.xmax >= 0.0)
        polyline({{0.0, world_.ymin}, {0.0, world_.ymax}}, "#999999", 0.5);
}

std::string Svg::str() const {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w_) + "\" height=\"" +
           std::to_string(h_) + "\" viewBox=\"0 0 " + std::to_string(w_) + " " + std::to_string(h_) + "\">\n" +
           "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + body_ + "</svg>\n";
}

}  // namespace torusdyn::harness
