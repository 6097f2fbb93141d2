#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sacseg/error.hpp"

namespace sacseg {

/// Row-major 2D grid, x = column, y = row, origin top-left.
template <typename T>
class Grid {
public:
    using value_type = T;

    Grid() = default;
    Grid(int width, int height, T fill = T{})
        : width_(width), height_(height), data_(checked_size(width, height), fill) {}
    Grid(int width, int height, std::vector<T> data)
        : width_(width), height_(height), data_(std::move(data)) {
        if (data_.size() != checked_size(width, height)) {
            throw Error(ErrorKind::DimensionMismatch, "data length does not equal width*height");
        }
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(int x, int y) { return data_[index(x, y)]; }
    const T& operator()(int x, int y) const { return data_[index(x, y)]; }
    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }
    bool in_bounds(int x, int y) const noexcept {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }

    std::span<T> pixels() noexcept { return data_; }
    std::span<const T> pixels() const noexcept { return data_; }
    const std::vector<T>& vec() const noexcept { return data_; }

    template <typename U>
    bool same_shape(const Grid<U>& other) const noexcept {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.width_ == b.width_ && a.height_ == b.height_ && a.data_ == b.data_;
    }

private:
    static std::size_t checked_size(int width, int height) {
        if (width <= 0 || height <= 0) {
            throw Error(ErrorKind::ZeroDimension, "image dimensions must be positive");
        }
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

/// Scalar intensities on the [0,255] working scale (real-valued).
using GrayImage = Grid<double>;
/// 0 = false, 1 = true.
using BinaryMask = Grid<std::uint8_t>;
/// 0 = watershed line / unassigned, 1..K = basin identity.
using LabelMap = Grid<std::int32_t>;

enum class Connectivity { Four, Eight };

struct Point {
    int x = 0;
    int y = 0;
    friend bool operator==(const Point&, const Point&) = default;
};

/// In-bounds neighbors in fixed order: N, S, W, E, then NW, NE, SW, SE.
std::vector<Point> neighbors(int x, int y, int width, int height, Connectivity conn);

/// Offsets in the same order as neighbors(); used by the hot loops.
struct Offset {
    int dx;
    int dy;
};
std::span<const Offset> neighbor_offsets(Connectivity conn);

/// Throws NonFiniteImage if any pixel is NaN/Inf.
void require_finite(const GrayImage& img);

template <typename A, typename B>
void require_same_shape(const Grid<A>& a, const Grid<B>& b, const char* what) {
    if (!a.same_shape(b)) {
        throw Error(ErrorKind::DimensionMismatch, what);
    }
}

std::size_t count_true(const BinaryMask& mask);

/// Connected components of true pixels, numbered 1..K in raster order of their
/// first pixel. Returns the label map (0 outside the mask) and K.
std::pair<LabelMap, int> label_components(const BinaryMask& mask, Connectivity conn);

/// Max label value of a label map (0 for an empty one).
int max_label(const LabelMap& labels);

}  // namespace sacseg
