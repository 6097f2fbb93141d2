#include "sacseg/watershed.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "sacseg/morph.hpp"

namespace sacseg {

Grid<std::uint8_t> quantize_levels(const GrayImage& img) {
    Grid<std::uint8_t> out(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double v = std::clamp(img[i], 0.0, 255.0);
        out[i] = static_cast<std::uint8_t>(std::floor(v + 0.5));
    }
    return out;
}

GrayImage gradient_magnitude(const GrayImage& img) {
    const int w = img.width();
    const int h = img.height();
    GrayImage out(w, h);
    auto at = [&](int x, int y) {
        return img(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gx = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1)) -
                              (at(x - 1, y - 1) + 2.0 * at(x - 1, y) + at(x - 1, y + 1));
            const double gy = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1)) -
                              (at(x - 1, y - 1) + 2.0 * at(x, y - 1) + at(x + 1, y - 1));
            out(x, y) = std::sqrt(gx * gx + gy * gy);
        }
    }
    return out;
}

namespace {

constexpr std::int32_t kTie = -2;

// Renumbers basins so that label order follows the raster position of the
// first pixel of each basin's minimum.
WatershedResult finalize(std::vector<std::int32_t>& labels, const std::vector<std::size_t>& seeds,
                         int w, int h) {
    std::vector<std::int32_t> order(seeds.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::int32_t a, std::int32_t b) { return seeds[a] < seeds[b]; });
    std::vector<std::int32_t> remap(seeds.size() + 1, 0);
    for (std::size_t k = 0; k < order.size(); ++k) {
        remap[static_cast<std::size_t>(order[k]) + 1] = static_cast<std::int32_t>(k + 1);
    }
    WatershedResult res;
    res.labels = LabelMap(w, h, 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto l = labels[i];
        if (l > 0) {
            res.labels[i] = remap[static_cast<std::size_t>(l)];
        } else {
            res.labels[i] = 0;
            ++res.watershed_pixels;
        }
    }
    res.n_basins = static_cast<int>(seeds.size());
    return res;
}

std::int32_t merge_state(std::int32_t current, std::int32_t incoming) {
    if (current == incoming) return current;
    return kTie;
}

}  // namespace

WatershedResult watershed_vs(const GrayImage& img, Connectivity conn) {
    const int w = img.width();
    const int h = img.height();
    const std::size_t n = img.size();
    const auto lev = quantize_levels(img);
    const auto offs = neighbor_offsets(conn);

    // Counting sort; each bucket stays in raster order.
    std::array<std::size_t, 257> start{};
    for (std::size_t i = 0; i < n; ++i) ++start[static_cast<std::size_t>(lev[i]) + 1];
    for (std::size_t k = 1; k < start.size(); ++k) start[k] += start[k - 1];
    std::vector<std::size_t> sorted(n);
    {
        auto fill = start;
        for (std::size_t i = 0; i < n; ++i) sorted[fill[lev[i]]++] = i;
    }

    constexpr std::int32_t kUnseen = -1;
    constexpr std::int32_t kWshed = 0;
    std::vector<std::int32_t> lab(n, kUnseen);
    std::vector<std::int32_t> state(n, 0);
    std::vector<std::uint32_t> region_stamp(n, 0);
    std::vector<std::uint32_t> visit_stamp(n, 0);
    std::vector<std::uint32_t> dist(n, 0);
    std::vector<std::uint8_t> is_pending(n, 0);
    std::vector<std::size_t> fresh;  // pixels that joined a basin at the previous level
    std::vector<std::size_t> seeds;  // raster index of each basin's first minimum pixel
    std::vector<std::size_t> pending;  // watershed pixels that may still be reassigned
    std::vector<std::size_t> region;
    std::vector<std::size_t> queue;
    std::vector<std::size_t> next_pending;
    std::uint32_t stamp = 0;

    auto for_each_neighbor = [&](std::size_t i, auto&& fn) {
        const int x = static_cast<int>(i % static_cast<std::size_t>(w));
        const int y = static_cast<int>(i / static_cast<std::size_t>(w));
        for (const auto& o : offs) {
            const int nx = x + o.dx;
            const int ny = y + o.dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            fn(static_cast<std::size_t>(ny) * static_cast<std::size_t>(w) +
               static_cast<std::size_t>(nx));
        }
    };

    // A watershed pixel touching two different basins keeps distance 1 to both
    // forever, so it can never be reassigned.
    auto touches_two_basins = [&](std::size_t i) {
        std::int32_t first = 0;
        bool two = false;
        for_each_neighbor(i, [&](std::size_t q) {
            const auto l = lab[q];
            if (l <= 0) return;
            if (first == 0) {
                first = l;
            } else if (l != first) {
                two = true;
            }
        });
        return two;
    };

    for (int level = 0; level < 256; ++level) {
        const std::size_t b0 = start[static_cast<std::size_t>(level)];
        const std::size_t b1 = start[static_cast<std::size_t>(level) + 1];
        if (b0 == b1) continue;
        ++stamp;

        region.clear();
        for (std::size_t k = b0; k < b1; ++k) {
            region.push_back(sorted[k]);
            region_stamp[sorted[k]] = stamp;
        }
        // Only pending pixels connected to this level, or next to a basin that
        // just grew, can change; the rest see exactly the inputs they saw last time.
        for (auto f : fresh) {
            for_each_neighbor(f, [&](std::size_t q) {
                if (is_pending[q] && region_stamp[q] != stamp) {
                    region_stamp[q] = stamp;
                    region.push_back(q);
                }
            });
        }
        for (std::size_t r = 0; r < region.size(); ++r) {
            for_each_neighbor(region[r], [&](std::size_t q) {
                if (is_pending[q] && region_stamp[q] != stamp) {
                    region_stamp[q] = stamp;
                    region.push_back(q);
                }
            });
        }

        // Layer 1: region pixels next to a basin, plus settled watershed pixels
        // next to the region (distance 1 to at least two basins).
        queue.clear();
        for (auto i : region) {
            bool hit = false;
            std::int32_t s = 0;
            for_each_neighbor(i, [&](std::size_t q) {
                const auto l = lab[q];
                if (l > 0) {
                    s = hit ? merge_state(s, l) : l;
                    hit = true;
                } else if (l == kWshed && region_stamp[q] != stamp && visit_stamp[q] != stamp) {
                    visit_stamp[q] = stamp;
                    dist[q] = 1;
                    state[q] = kTie;
                    queue.push_back(q);
                }
            });
            if (hit) {
                visit_stamp[i] = stamp;
                dist[i] = 1;
                state[i] = s;
                queue.push_back(i);
            }
        }

        // Breadth-first propagation inside the region. A pixel's state is the
        // union of the states of its predecessors one layer closer.
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const std::size_t p = queue[head];
            const std::int32_t sp = state[p];
            const std::uint32_t dq = dist[p] + 1;
            for_each_neighbor(p, [&](std::size_t q) {
                if (region_stamp[q] != stamp) return;
                if (visit_stamp[q] != stamp) {
                    visit_stamp[q] = stamp;
                    dist[q] = dq;
                    state[q] = sp;
                    queue.push_back(q);
                } else if (dist[q] == dq) {
                    state[q] = merge_state(state[q], sp);
                }
            });
        }

        // Assign reached pixels.
        next_pending.clear();
        for (auto i : region) {
            if (visit_stamp[i] != stamp) continue;
            lab[i] = state[i] == kTie ? kWshed : state[i];
        }

        // Unreached pixels of this level start new basins.
        for (std::size_t k = b0; k < b1; ++k) {
            const std::size_t s0 = sorted[k];
            if (visit_stamp[s0] == stamp) continue;
            const auto id = static_cast<std::int32_t>(seeds.size() + 1);
            seeds.push_back(s0);
            visit_stamp[s0] = stamp;
            lab[s0] = id;
            std::size_t qh = queue.size();
            queue.push_back(s0);
            for (; qh < queue.size(); ++qh) {
                for_each_neighbor(queue[qh], [&](std::size_t q) {
                    if (region_stamp[q] == stamp && visit_stamp[q] != stamp) {
                        visit_stamp[q] = stamp;
                        lab[q] = id;
                        queue.push_back(q);
                    }
                });
            }
        }

        for (auto i : pending) {
            if (region_stamp[i] != stamp) next_pending.push_back(i);
        }
        fresh.clear();
        for (auto i : region) {
            is_pending[i] = lab[i] == kWshed && !touches_two_basins(i);
            if (is_pending[i]) next_pending.push_back(i);
            if (lab[i] > 0) fresh.push_back(i);
        }
        pending.swap(next_pending);
    }

    for (auto& l : lab) {
        if (l < 0) l = 0;
    }
    return finalize(lab, seeds, w, h);
}

WatershedResult flooding_oracle(const GrayImage& img, Connectivity conn) {
    if (img.width() > 64 || img.height() > 64) {
        throw Error(ErrorKind::ImageTooLarge, "flooding_oracle is limited to 64x64 images");
    }
    const int w = img.width();
    const int h = img.height();
    const std::size_t n = img.size();
    const auto sets = flood_level_sets(img);
    const auto offs = neighbor_offsets(conn);
    constexpr int kInf = std::numeric_limits<int>::max();

    std::vector<std::int32_t> lab(n, 0);  // Y_R: basin label, 0 outside
    std::vector<std::size_t> seeds;

    auto bfs_from = [&](const std::vector<std::size_t>& sources, const BinaryMask& within) {
        std::vector<int> d(n, kInf);
        std::vector<std::size_t> q;
        for (auto s : sources) {
            d[s] = 0;
            q.push_back(s);
        }
        for (std::size_t head = 0; head < q.size(); ++head) {
            const std::size_t p = q[head];
            const int x = static_cast<int>(p % static_cast<std::size_t>(w));
            const int y = static_cast<int>(p / static_cast<std::size_t>(w));
            for (const auto& o : offs) {
                const int nx = x + o.dx;
                const int ny = y + o.dy;
                if (!within.in_bounds(nx, ny) || !within(nx, ny)) continue;
                const std::size_t qi = within.index(nx, ny);
                if (d[qi] != kInf) continue;
                d[qi] = d[p] + 1;
                q.push_back(qi);
            }
        }
        return d;
    };

    for (std::size_t li = 0; li < sets.levels.size(); ++li) {
        const BinaryMask& t = sets.threshold_sets[li];
        std::vector<std::int32_t> next = lab;

        // Influence zones of the current basins inside T_R.
        std::vector<std::vector<int>> dmaps;
        for (std::size_t b = 1; b <= seeds.size(); ++b) {
            std::vector<std::size_t> src;
            for (std::size_t i = 0; i < n; ++i) {
                if (lab[i] == static_cast<std::int32_t>(b)) src.push_back(i);
            }
            dmaps.push_back(bfs_from(src, t));
        }
        BinaryMask unreached(w, h, 0);
        for (std::size_t i = 0; i < n; ++i) {
            if (!t[i] || lab[i] != 0) continue;
            int best = kInf;
            int owner = 0;
            bool tie = false;
            for (std::size_t b = 0; b < dmaps.size(); ++b) {
                const int d = dmaps[b][i];
                if (d < best) {
                    best = d;
                    owner = static_cast<int>(b) + 1;
                    tie = false;
                } else if (d == best && d != kInf) {
                    tie = true;
                }
            }
            if (best == kInf) {
                unreached[i] = 1;
            } else if (!tie) {
                next[i] = owner;
            }
        }

        // New minima: components of T_R that no basin reaches.
        auto [comps, k] = label_components(unreached, conn);
        std::vector<std::int32_t> ids(static_cast<std::size_t>(k) + 1, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = comps[i];
            if (c == 0) continue;
            auto& id = ids[static_cast<std::size_t>(c)];
            if (id == 0) {
                seeds.push_back(i);
                id = static_cast<std::int32_t>(seeds.size());
            }
            next[i] = id;
        }
        lab.swap(next);
    }
    return finalize(lab, seeds, w, h);
}

WatershedResult marker_watershed(const GrayImage& img, const BinaryMask& markers,
                                 Connectivity conn) {
    require_same_shape(img, markers, "marker_watershed image and markers differ in size");
    if (count_true(markers) == 0) {
        throw Error(ErrorKind::EmptyMarker, "marker_watershed needs at least one marker");
    }
    return watershed_vs(impose_minima(img, markers, conn), conn);
}

FloodLevelSets flood_level_sets(const GrayImage& img) {
    const auto lev = quantize_levels(img);
    std::array<bool, 256> present{};
    for (auto v : lev.pixels()) present[v] = true;
    FloodLevelSets out;
    for (int r = 0; r < 256; ++r) {
        if (!present[static_cast<std::size_t>(r)]) continue;
        BinaryMask t(img.width(), img.height(), 0);
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = lev[i] <= r ? 1 : 0;
        out.levels.push_back(r);
        out.threshold_sets.push_back(std::move(t));
    }
    return out;
}

bool same_partition(const LabelMap& a, const LabelMap& b) {
    if (!a.same_shape(b)) return false;
    std::map<std::int32_t, std::int32_t> ab;
    std::map<std::int32_t, std::int32_t> ba;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto la = a[i];
        const auto lb = b[i];
        if ((la == 0) != (lb == 0)) return false;
        if (la == 0) continue;
        auto [ia, inserted_a] = ab.emplace(la, lb);
        auto [ib, inserted_b] = ba.emplace(lb, la);
        if (ia->second != lb || ib->second != la) return false;
    }
    return true;
}

}  // namespace sacseg
