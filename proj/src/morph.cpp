#include "sacseg/morph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "sacseg/watershed.hpp"

namespace sacseg {

std::vector<Offset> StructuringElement::offsets() const {
    std::vector<Offset> out;
    const int r = std::max(radius, 0);
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            bool keep = false;
            switch (shape) {
                case Shape::Square: keep = true; break;
                case Shape::Cross: keep = dx == 0 || dy == 0; break;
                case Shape::Disk: keep = dx * dx + dy * dy <= r * r; break;
            }
            if (keep) out.push_back({dx, dy});
        }
    }
    return out;
}

int default_marker_radius(int width, int height) {
    const double scaled = 5.0 * std::min(width, height) / 900.0;
    return std::max(1, static_cast<int>(std::floor(scaled + 0.5)));
}

GrayImage complement(const GrayImage& img) {
    GrayImage out(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) out[i] = 255.0 - img[i];
    return out;
}

namespace {

// out(p) = op over in-bounds offsets of img(p + o). Each offset is applied as a
// clipped row sweep so the inner loop is a plain elementwise op.
template <typename T, typename Op>
Grid<T> window_filter(const Grid<T>& img, const StructuringElement& se, T identity, Op op) {
    const int w = img.width();
    const int h = img.height();
    Grid<T> out(w, h, identity);
    for (const auto& o : se.offsets()) {
        const int y0 = std::max(0, -o.dy);
        const int y1 = std::min(h, h - o.dy);
        const int x0 = std::max(0, -o.dx);
        const int x1 = std::min(w, w - o.dx);
        for (int y = y0; y < y1; ++y) {
            T* dst = &out(0, y);
            const T* src = &img(0, y + o.dy);
            for (int x = x0; x < x1; ++x) dst[x] = op(dst[x], src[x + o.dx]);
        }
    }
    return out;
}

}  // namespace

GrayImage erode(const GrayImage& img, const StructuringElement& se) {
    return window_filter(img, se, std::numeric_limits<double>::infinity(),
                         [](double a, double b) { return std::min(a, b); });
}

GrayImage dilate(const GrayImage& img, const StructuringElement& se) {
    return window_filter(img, se, -std::numeric_limits<double>::infinity(),
                         [](double a, double b) { return std::max(a, b); });
}

BinaryMask erode_mask(const BinaryMask& mask, const StructuringElement& se) {
    return window_filter<std::uint8_t>(mask, se, 1,
                                       [](std::uint8_t a, std::uint8_t b) -> std::uint8_t {
                                           return a && b;
                                       });
}

GrayImage reconstruct_by_dilation(const GrayImage& marker, const GrayImage& mask,
                                  Connectivity conn) {
    require_same_shape(marker, mask, "reconstruction marker and mask differ in size");
    for (std::size_t i = 0; i < marker.size(); ++i) {
        if (marker[i] > mask[i]) {
            throw Error(ErrorKind::MarkerExceedsMask, "marker exceeds mask at pixel " +
                                                          std::to_string(i));
        }
    }
    const int w = marker.width();
    const int h = marker.height();
    GrayImage out = marker;
    const auto offs = neighbor_offsets(conn);

    // Neighbours preceding a pixel in raster order (N, W and for eight NW, NE).
    std::vector<Offset> before;
    std::vector<Offset> after;
    for (const auto& o : offs) {
        if (o.dy < 0 || (o.dy == 0 && o.dx < 0)) {
            before.push_back(o);
        } else {
            after.push_back(o);
        }
    }

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double v = out(x, y);
            for (const auto& o : before) {
                const int nx = x + o.dx;
                const int ny = y + o.dy;
                if (out.in_bounds(nx, ny)) v = std::max(v, out(nx, ny));
            }
            out(x, y) = std::min(v, mask(x, y));
        }
    }

    std::deque<Point> fifo;
    for (int y = h - 1; y >= 0; --y) {
        for (int x = w - 1; x >= 0; --x) {
            double v = out(x, y);
            for (const auto& o : after) {
                const int nx = x + o.dx;
                const int ny = y + o.dy;
                if (out.in_bounds(nx, ny)) v = std::max(v, out(nx, ny));
            }
            v = std::min(v, mask(x, y));
            out(x, y) = v;
            for (const auto& o : after) {
                const int nx = x + o.dx;
                const int ny = y + o.dy;
                if (out.in_bounds(nx, ny) && out(nx, ny) < v && out(nx, ny) < mask(nx, ny)) {
                    fifo.push_back({x, y});
                    break;
                }
            }
        }
    }

    while (!fifo.empty()) {
        const Point p = fifo.front();
        fifo.pop_front();
        const double v = out(p.x, p.y);
        for (const auto& o : offs) {
            const int nx = p.x + o.dx;
            const int ny = p.y + o.dy;
            if (!out.in_bounds(nx, ny)) continue;
            double& q = out(nx, ny);
            const double m = mask(nx, ny);
            if (q < v && q != m) {
                q = std::min(v, m);
                fifo.push_back({nx, ny});
            }
        }
    }
    return out;
}

GrayImage reconstruct_by_erosion(const GrayImage& marker, const GrayImage& mask,
                                 Connectivity conn) {
    return complement(reconstruct_by_dilation(complement(marker), complement(mask), conn));
}

GrayImage open_by_reconstruction(const GrayImage& img, const StructuringElement& se,
                                 Connectivity conn) {
    return reconstruct_by_dilation(erode(img, se), img, conn);
}

GrayImage close_by_reconstruction(const GrayImage& img, const StructuringElement& se,
                                  Connectivity conn) {
    return complement(open_by_reconstruction(complement(img), se, conn));
}

BinaryMask fill_holes(const BinaryMask& mask, Connectivity conn) {
    const int w = mask.width();
    const int h = mask.height();
    BinaryMask reached(w, h, 0);
    std::deque<Point> queue;
    auto seed = [&](int x, int y) {
        if (!mask(x, y) && !reached(x, y)) {
            reached(x, y) = 1;
            queue.push_back({x, y});
        }
    };
    for (int x = 0; x < w; ++x) {
        seed(x, 0);
        seed(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        seed(0, y);
        seed(w - 1, y);
    }
    // background takes the dual connectivity, so diagonal gaps between object pixels are not walls
    const auto offs = neighbor_offsets(conn == Connectivity::Four ? Connectivity::Eight : Connectivity::Four);
    while (!queue.empty()) {
        const Point p = queue.front();
        queue.pop_front();
        for (const auto& o : offs) {
            const int nx = p.x + o.dx;
            const int ny = p.y + o.dy;
            if (mask.in_bounds(nx, ny)) seed(nx, ny);
        }
    }
    BinaryMask out(w, h);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = reached[i] ? 0 : 1;
    return out;
}

BinaryMask regional_minima(const GrayImage& img, Connectivity conn) {
    const int w = img.width();
    const int h = img.height();
    BinaryMask out(w, h, 0);
    BinaryMask visited(w, h, 0);
    const auto offs = neighbor_offsets(conn);
    std::vector<Point> plateau;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (visited(x, y)) continue;
            const double v = img(x, y);
            bool is_min = true;
            plateau.clear();
            plateau.push_back({x, y});
            visited(x, y) = 1;
            for (std::size_t k = 0; k < plateau.size(); ++k) {
                const Point p = plateau[k];
                for (const auto& o : offs) {
                    const int nx = p.x + o.dx;
                    const int ny = p.y + o.dy;
                    if (!img.in_bounds(nx, ny)) continue;
                    const double u = img(nx, ny);
                    if (u < v) {
                        is_min = false;
                    } else if (u == v && !visited(nx, ny)) {
                        visited(nx, ny) = 1;
                        plateau.push_back({nx, ny});
                    }
                }
            }
            if (is_min) {
                for (const auto& p : plateau) out(p.x, p.y) = 1;
            }
        }
    }
    return out;
}

GrayImage impose_minima(const GrayImage& img, const BinaryMask& markers, Connectivity conn) {
    require_same_shape(img, markers, "impose_minima image and markers differ in size");
    if (count_true(markers) == 0) {
        throw Error(ErrorKind::EmptyMarker, "no marker pixels to impose");
    }
    GrayImage marker_fn(img.width(), img.height());
    GrayImage raised(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) {
        marker_fn[i] = markers[i] ? 0.0 : 255.0;
        raised[i] = std::min(std::min(img[i] + 1.0, 255.0), marker_fn[i]);
    }
    return reconstruct_by_erosion(marker_fn, raised, conn);
}

namespace {

// Squared distance along one line (lower envelope of parabolas).
void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
            std::vector<double>& z) {
    const int n = static_cast<int>(f.size());
    constexpr double inf = std::numeric_limits<double>::infinity();
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[static_cast<std::size_t>(q)] == inf) continue;
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -inf;
            z[1] = inf;
            continue;
        }
        double s;
        for (;;) {
            const int p = v[static_cast<std::size_t>(k)];
            s = ((f[static_cast<std::size_t>(q)] + double(q) * q) -
                 (f[static_cast<std::size_t>(p)] + double(p) * p)) /
                (2.0 * (q - p));
            if (s <= z[static_cast<std::size_t>(k)] && k > 0) {
                --k;
            } else {
                break;
            }
        }
        if (s <= z[static_cast<std::size_t>(k)]) {
            // k == 0 and the new parabola dominates everywhere.
            v[0] = q;
            z[0] = -inf;
            z[1] = inf;
            continue;
        }
        ++k;
        v[static_cast<std::size_t>(k)] = q;
        z[static_cast<std::size_t>(k)] = s;
        z[static_cast<std::size_t>(k) + 1] = inf;
    }
    if (k < 0) {
        std::fill(d.begin(), d.end(), inf);
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (z[static_cast<std::size_t>(j) + 1] < q) ++j;
        const int p = v[static_cast<std::size_t>(j)];
        d[static_cast<std::size_t>(q)] = double(q - p) * (q - p) + f[static_cast<std::size_t>(p)];
    }
}

}  // namespace

GrayImage distance_transform(const BinaryMask& mask) {
    if (count_true(mask) == 0) {
        throw Error(ErrorKind::EmptyMask, "distance transform needs at least one true pixel");
    }
    const int w = mask.width();
    const int h = mask.height();
    constexpr double inf = std::numeric_limits<double>::infinity();
    GrayImage sq(w, h);
    for (std::size_t i = 0; i < mask.size(); ++i) sq[i] = mask[i] ? 0.0 : inf;

    const std::size_t n = static_cast<std::size_t>(std::max(w, h));
    std::vector<double> f(n), d(n), z(n + 1);
    std::vector<int> v(n);

    f.resize(static_cast<std::size_t>(h));
    d.resize(static_cast<std::size_t>(h));
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) f[static_cast<std::size_t>(y)] = sq(x, y);
        edt_1d(f, d, v, z);
        for (int y = 0; y < h; ++y) sq(x, y) = d[static_cast<std::size_t>(y)];
    }
    f.resize(static_cast<std::size_t>(w));
    d.resize(static_cast<std::size_t>(w));
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) f[static_cast<std::size_t>(x)] = sq(x, y);
        edt_1d(f, d, v, z);
        for (int x = 0; x < w; ++x) sq(x, y) = d[static_cast<std::size_t>(x)];
    }
    for (auto& px : sq.pixels()) px = std::sqrt(px);
    return sq;
}

SkizResult skiz(const BinaryMask& markers, Connectivity conn) {
    if (count_true(markers) == 0) {
        throw Error(ErrorKind::EmptyMask, "SKIZ needs at least one marker component");
    }
    const GrayImage dist = distance_transform(markers);
    WatershedResult ws = marker_watershed(dist, markers, conn);

    const int w = markers.width();
    const int h = markers.height();
    BinaryMask boundary(w, h, 0);
    const auto offs = neighbor_offsets(conn);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const auto l = ws.labels(x, y);
            if (l == 0) {
                boundary(x, y) = 1;
                continue;
            }
            for (const auto& o : offs) {
                const int nx = x + o.dx;
                const int ny = y + o.dy;
                if (!markers.in_bounds(nx, ny)) continue;
                const auto m = ws.labels(nx, ny);
                if (m != 0 && m != l) {
                    boundary(x, y) = 1;
                    break;
                }
            }
        }
    }
    return {std::move(ws.labels), std::move(boundary)};
}

}  // namespace sacseg
