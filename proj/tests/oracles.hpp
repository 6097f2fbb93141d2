#pragma once
// Slow, obviously-correct reference implementations used by the tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <queue>
#include <random>
#include <vector>

#include "sacseg/image.hpp"
#include "sacseg/morph.hpp"

namespace oracle {

using sacseg::BinaryMask;
using sacseg::Connectivity;
using sacseg::GrayImage;
using sacseg::LabelMap;

inline GrayImage random_image(int w, int h, int levels, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> d(0, levels - 1);
    GrayImage img(w, h);
    for (auto& v : img.pixels()) v = d(rng);
    return img;
}

inline BinaryMask random_mask(int w, int h, double p, std::mt19937_64& rng) {
    std::bernoulli_distribution d(p);
    BinaryMask m(w, h);
    for (auto& v : m.pixels()) v = d(rng);
    return m;
}

inline std::vector<std::pair<int, int>> offsets(Connectivity conn) {
    std::vector<std::pair<int, int>> o{{0, -1}, {0, 1}, {-1, 0}, {1, 0}};
    if (conn == Connectivity::Eight) o.insert(o.end(), {{-1, -1}, {1, -1}, {-1, 1}, {1, 1}});
    return o;
}

// Window min/max straight from the definition.
inline GrayImage window_op(const GrayImage& img, const sacseg::StructuringElement& se, bool is_min) {
    GrayImage out(img.width(), img.height());
    const int r = se.radius;
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            double best = is_min ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    bool in = false;
                    switch (se.shape) {
                        case sacseg::StructuringElement::Shape::Square: in = true; break;
                        case sacseg::StructuringElement::Shape::Cross: in = dx == 0 || dy == 0; break;
                        case sacseg::StructuringElement::Shape::Disk: in = dx * dx + dy * dy <= r * r; break;
                    }
                    if (!in || !img.in_bounds(x + dx, y + dy)) continue;
                    const double v = img(x + dx, y + dy);
                    best = is_min ? std::min(best, v) : std::max(best, v);
                }
            }
            out(x, y) = best;
        }
    }
    return out;
}

// Iterated geodesic dilation g <- min(dilate_conn(g), mask) to the fixed point.
inline GrayImage geodesic_reconstruct(GrayImage g, const GrayImage& mask, Connectivity conn) {
    const auto off = offsets(conn);
    for (bool changed = true; changed;) {
        changed = false;
        GrayImage next = g;
        for (int y = 0; y < g.height(); ++y) {
            for (int x = 0; x < g.width(); ++x) {
                double m = g(x, y);
                for (auto [dx, dy] : off) {
                    if (g.in_bounds(x + dx, y + dy)) m = std::max(m, g(x + dx, y + dy));
                }
                m = std::min(m, mask(x, y));
                if (m != next(x, y)) {
                    next(x, y) = m;
                    changed = true;
                }
            }
        }
        g = std::move(next);
    }
    return g;
}

inline GrayImage brute_edt(const BinaryMask& mask) {
    GrayImage out(mask.width(), mask.height());
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            double best = std::numeric_limits<double>::infinity();
            for (int v = 0; v < mask.height(); ++v) {
                for (int u = 0; u < mask.width(); ++u) {
                    if (mask(u, v)) best = std::min(best, std::hypot(double(x - u), double(y - v)));
                }
            }
            out(x, y) = best;
        }
    }
    return out;
}

// A pixel is a regional minimum iff no strictly lower pixel is reachable
// along a path of equal values.
inline BinaryMask brute_regional_minima(const GrayImage& img, Connectivity conn) {
    const auto off = offsets(conn);
    BinaryMask out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const double v = img(x, y);
            std::vector<char> seen(img.size(), 0);
            std::queue<std::pair<int, int>> q;
            q.push({x, y});
            seen[img.index(x, y)] = 1;
            bool minimum = true;
            while (!q.empty() && minimum) {
                auto [cx, cy] = q.front();
                q.pop();
                for (auto [dx, dy] : off) {
                    const int nx = cx + dx, ny = cy + dy;
                    if (!img.in_bounds(nx, ny)) continue;
                    if (img(nx, ny) < v) {
                        minimum = false;
                        break;
                    }
                    if (img(nx, ny) == v && !seen[img.index(nx, ny)]) {
                        seen[img.index(nx, ny)] = 1;
                        q.push({nx, ny});
                    }
                }
            }
            out(x, y) = minimum;
        }
    }
    return out;
}

inline std::vector<double> dft_magnitudes(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<double> out(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        std::complex<double> s = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double a = -2.0 * std::numbers::pi * static_cast<double>((k * t) % n) / static_cast<double>(n);
            s += x[t] * std::complex<double>(std::cos(a), std::sin(a));
        }
        out[k] = std::abs(s);
    }
    return out;
}

// Two label maps describe the same segmentation: same zero set, and a
// one-to-one correspondence between positive labels.
inline bool same_partition(const LabelMap& a, const LabelMap& b) {
    if (!a.same_shape(b)) return false;
    std::map<int, int> ab, ba;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if ((a[i] == 0) != (b[i] == 0)) return false;
        if (a[i] == 0) continue;
        auto [it1, new1] = ab.emplace(a[i], b[i]);
        auto [it2, new2] = ba.emplace(b[i], a[i]);
        if (it1->second != b[i] || it2->second != a[i]) return false;
    }
    return true;
}

// Every labelling of a tiny grid: unary + smooth * (#differing 4-neighbour pairs).
struct CutOracle {
    double energy;
    std::vector<std::uint8_t> labels;
};
inline CutOracle brute_min_cut(int w, int h, const std::vector<double>& cost0, const std::vector<double>& cost1,
                               double smooth) {
    const int n = w * h;
    CutOracle best{std::numeric_limits<double>::infinity(), {}};
    for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
        double e = 0.0;
        for (int p = 0; p < n; ++p) e += (bits >> p & 1) ? cost1[p] : cost0[p];
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const int p = y * w + x;
                if (x + 1 < w && ((bits >> p) & 1) != ((bits >> (p + 1)) & 1)) e += smooth;
                if (y + 1 < h && ((bits >> p) & 1) != ((bits >> (p + w)) & 1)) e += smooth;
            }
        }
        if (e < best.energy) {
            best.energy = e;
            best.labels.assign(n, 0);
            for (int p = 0; p < n; ++p) best.labels[p] = (bits >> p) & 1;
        }
    }
    return best;
}

inline double labelling_energy(int w, int h, const std::vector<double>& cost0, const std::vector<double>& cost1,
                               double smooth, const std::vector<std::uint8_t>& lab) {
    double e = 0.0;
    for (int p = 0; p < w * h; ++p) e += lab[p] ? cost1[p] : cost0[p];
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int p = y * w + x;
            if (x + 1 < w && lab[p] != lab[p + 1]) e += smooth;
            if (y + 1 < h && lab[p] != lab[p + w]) e += smooth;
        }
    }
    return e;
}

}  // namespace oracle
