#include "sacseg/image.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>

namespace sacseg {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::FileNotFound: return "FileNotFound";
        case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
        case ErrorKind::ZeroDimension: return "ZeroDimension";
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::RangeError: return "RangeError";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::MarkerExceedsMask: return "MarkerExceedsMask";
        case ErrorKind::EmptyMarker: return "EmptyMarker";
        case ErrorKind::EmptyMask: return "EmptyMask";
        case ErrorKind::ImageTooLarge: return "ImageTooLarge";
        case ErrorKind::DegenerateInit: return "DegenerateInit";
        case ErrorKind::NonFiniteImage: return "NonFiniteImage";
        case ErrorKind::DimensionTooSmall: return "DimensionTooSmall";
        case ErrorKind::NonFiniteSample: return "NonFiniteSample";
        case ErrorKind::DepthOutOfRange: return "DepthOutOfRange";
        case ErrorKind::TooManySacs: return "TooManySacs";
        case ErrorKind::UsageError: return "UsageError";
    }
    return "Unknown";
}

namespace {

constexpr std::array<Offset, 8> kOffsets{{
    {0, -1}, {0, 1}, {-1, 0}, {1, 0},    // N S W E
    {-1, -1}, {1, -1}, {-1, 1}, {1, 1},  // NW NE SW SE
}};

}  // namespace

std::span<const Offset> neighbor_offsets(Connectivity conn) {
    return {kOffsets.data(), conn == Connectivity::Four ? 4u : 8u};
}

std::vector<Point> neighbors(int x, int y, int width, int height, Connectivity conn) {
    std::vector<Point> out;
    out.reserve(8);
    for (const auto& o : neighbor_offsets(conn)) {
        const int nx = x + o.dx;
        const int ny = y + o.dy;
        if (nx >= 0 && ny >= 0 && nx < width && ny < height) {
            out.push_back({nx, ny});
        }
    }
    return out;
}

void require_finite(const GrayImage& img) {
    for (double v : img.pixels()) {
        if (!std::isfinite(v)) {
            throw Error(ErrorKind::NonFiniteImage, "image contains NaN or Inf");
        }
    }
}

std::size_t count_true(const BinaryMask& mask) {
    return static_cast<std::size_t>(
        std::count_if(mask.pixels().begin(), mask.pixels().end(), [](auto v) { return v != 0; }));
}

std::pair<LabelMap, int> label_components(const BinaryMask& mask, Connectivity conn) {
    const int w = mask.width();
    const int h = mask.height();
    LabelMap labels(w, h, 0);
    const auto offs = neighbor_offsets(conn);
    std::deque<Point> queue;
    int next = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask(x, y) || labels(x, y) != 0) continue;
            ++next;
            labels(x, y) = next;
            queue.push_back({x, y});
            while (!queue.empty()) {
                const Point p = queue.front();
                queue.pop_front();
                for (const auto& o : offs) {
                    const int nx = p.x + o.dx;
                    const int ny = p.y + o.dy;
                    if (!mask.in_bounds(nx, ny) || !mask(nx, ny) || labels(nx, ny) != 0) continue;
                    labels(nx, ny) = next;
                    queue.push_back({nx, ny});
                }
            }
        }
    }
    return {std::move(labels), next};
}

int max_label(const LabelMap& labels) {
    int m = 0;
    for (auto v : labels.pixels()) m = std::max(m, static_cast<int>(v));
    return m;
}

}  // namespace sacseg
