#include "sacseg/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "sacseg/morph.hpp"
#include "sacseg/octsim.hpp"
#include "sacseg/watershed.hpp"

namespace sacseg {

void validate(const PipelineConfig& cfg) {
    if (!(cfg.threshold >= 0.0 && cfg.threshold <= 255.0)) {
        throw Error(ErrorKind::RangeError, "threshold must lie in [0,255]");
    }
    if (cfg.fg_se_radius < 0) throw Error(ErrorKind::RangeError, "fg_se_radius must be >= 0");
    if (cfg.hann_block < 0 || cfg.hann_block == 1) {
        throw Error(ErrorKind::RangeError, "hann block must be 0 (full) or >= 2");
    }
    const auto& cv = cfg.chan_vese;
    if (cv.mu < 0.0 || cv.lambda1 <= 0.0 || cv.lambda2 <= 0.0 || cv.max_iters < 1 || cv.tol <= 0.0) {
        throw Error(ErrorKind::RangeError, "invalid Chan-Vese parameters");
    }
}

GrayImage apply_hann_taper(const GrayImage& img, int block) {
    const int w = img.width(), h = img.height();
    const int bw = block > 0 ? block : w;
    const int bh = block > 0 ? block : h;
    GrayImage out(w, h, 0.0);
    for (int y0 = 0; y0 < h; y0 += bh) {
        for (int x0 = 0; x0 < w; x0 += bw) {
            const int tw = std::min(bw, w - x0), th = std::min(bh, h - y0);
            if (tw < 2 || th < 2) continue;  // a 1-px sliver has no interior: weight 0
            const GrayImage win = hann2d(tw, th);
            for (int y = 0; y < th; ++y) {
                for (int x = 0; x < tw; ++x) out(x0 + x, y0 + y) = img(x0 + x, y0 + y) * win(x, y);
            }
        }
    }
    return out;
}

GrayImage objects_dark(const GrayImage& img, Objects objects) {
    return objects == Objects::Dark ? img : complement(img);
}

BinaryMask preprocess_binary(const GrayImage& img, const PipelineConfig& cfg) {
    require_finite(img);
    BinaryMask mask0(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) mask0[i] = img[i] <= cfg.threshold;
    BinaryMask init = fill_holes(mask0, cfg.conn);

    if (count_true(init) == init.size()) {
        // Nothing saturated: the threshold kept everything, so start from the
        // mean split instead (the only way to seed two phases).
        double mean = 0.0;
        for (double v : img.pixels()) mean += v;
        mean /= static_cast<double>(img.size());
        for (std::size_t i = 0; i < img.size(); ++i) init[i] = img[i] <= mean;
        if (count_true(init) == init.size()) return init;  // flat image: one phase
    }

    const auto cv = chan_vese_run(img, init, cfg.chan_vese);
    BinaryMask out = cv.mask;
    const bool inside_darker = cv.c1 <= cv.c2;
    if (inside_darker != (cfg.objects == Objects::Dark)) {
        for (auto& v : out.pixels()) v = v ? 0 : 1;
    }
    return out;
}

BinaryMask foreground_markers(const GrayImage& img, const PipelineConfig& cfg) {
    const int r = cfg.fg_se_radius > 0 ? cfg.fg_se_radius : default_marker_radius(img.width(), img.height());
    const auto se = StructuringElement::disk(r);
    GrayImage s = open_by_reconstruction(objects_dark(img, cfg.objects), se, cfg.conn);
    s = close_by_reconstruction(s, se, cfg.conn);
    const BinaryMask minima = regional_minima(s, cfg.conn);

    const BinaryMask eroded = erode_mask(minima, StructuringElement::disk(1));
    auto [comp, n] = label_components(minima, cfg.conn);
    auto [piece, n_pieces] = label_components(eroded, cfg.conn);

    // Erosion only shrinks a marker: of the pieces it leaves, keep the largest
    // (first in raster order on ties); a marker it erases keeps its raster-first pixel.
    std::vector<std::size_t> area(static_cast<std::size_t>(n_pieces) + 1, 0);
    std::vector<std::int32_t> owner(static_cast<std::size_t>(n_pieces) + 1, 0);
    for (std::size_t i = 0; i < piece.size(); ++i) {
        ++area[static_cast<std::size_t>(piece[i])];
        owner[static_cast<std::size_t>(piece[i])] = comp[i];
    }
    std::vector<std::int32_t> best(static_cast<std::size_t>(n) + 1, 0);
    for (std::int32_t p = 1; p <= n_pieces; ++p) {
        auto& b = best[static_cast<std::size_t>(owner[static_cast<std::size_t>(p)])];
        if (b == 0 || area[static_cast<std::size_t>(p)] > area[static_cast<std::size_t>(b)]) b = p;
    }
    BinaryMask out(img.width(), img.height());
    std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
    for (std::size_t i = 0; i < comp.size(); ++i) {
        const auto k = static_cast<std::size_t>(comp[i]);
        if (k == 0) continue;
        if (best[k] == 0) {
            if (!seen[k]) out[i] = 1;
        } else {
            out[i] = piece[i] == best[k];
        }
        seen[k] = 1;
    }
    return out;
}

BinaryMask background_markers(const BinaryMask& binary, const PipelineConfig& cfg) {
    const SkizResult z = skiz(binary, cfg.conn);
    // Tie lines run diagonally and fall apart under 4-connectivity; taking
    // both sides of every zone change keeps each ridge one component.
    BinaryMask out(binary.width(), binary.height());
    for (int y = 0; y < binary.height(); ++y) {
        for (int x = 0; x < binary.width(); ++x) {
            if (binary(x, y)) continue;
            const auto l = z.labels(x, y);
            bool edge = l == 0;
            for (const auto& o : neighbor_offsets(Connectivity::Four)) {
                const int nx = x + o.dx, ny = y + o.dy;
                if (!edge && binary.in_bounds(nx, ny) && z.labels(nx, ny) != l) edge = true;
            }
            out(x, y) = edge;
        }
    }
    return out;
}

BinaryMask label_boundaries(const LabelMap& labels) {
    BinaryMask out(labels.width(), labels.height());
    for (int y = 0; y < labels.height(); ++y) {
        for (int x = 0; x < labels.width(); ++x) {
            const auto l = labels(x, y);
            if (l == 0) {
                out(x, y) = 1;
                continue;
            }
            for (const auto& o : neighbor_offsets(Connectivity::Four)) {
                const int nx = x + o.dx, ny = y + o.dy;
                if (!labels.in_bounds(nx, ny)) continue;
                const auto m = labels(nx, ny);
                if (m > 0 && m != l) {
                    out(x, y) = 1;
                    break;
                }
            }
        }
    }
    return out;
}

std::vector<RegionStats> region_stats(const LabelMap& labels) {
    const int k = max_label(labels);
    std::vector<RegionStats> st(static_cast<std::size_t>(k));
    std::vector<double> sx(st.size(), 0.0), sy(st.size(), 0.0);
    for (int i = 0; i < k; ++i) {
        st[static_cast<std::size_t>(i)].label = i + 1;
        st[static_cast<std::size_t>(i)].x0 = std::numeric_limits<int>::max();
        st[static_cast<std::size_t>(i)].y0 = std::numeric_limits<int>::max();
        st[static_cast<std::size_t>(i)].x1 = -1;
        st[static_cast<std::size_t>(i)].y1 = -1;
    }
    for (int y = 0; y < labels.height(); ++y) {
        for (int x = 0; x < labels.width(); ++x) {
            const auto l = labels(x, y);
            if (l <= 0) continue;
            auto& r = st[static_cast<std::size_t>(l - 1)];
            ++r.area;
            sx[static_cast<std::size_t>(l - 1)] += x;
            sy[static_cast<std::size_t>(l - 1)] += y;
            r.x0 = std::min(r.x0, x);
            r.y0 = std::min(r.y0, y);
            r.x1 = std::max(r.x1, x);
            r.y1 = std::max(r.y1, y);
        }
    }
    for (std::size_t i = 0; i < st.size(); ++i) {
        if (st[i].area == 0) continue;
        st[i].cx = sx[i] / static_cast<double>(st[i].area);
        st[i].cy = sy[i] / static_cast<double>(st[i].area);
    }
    return st;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void fill_report(SegmentationReport& rep, LabelMap labels) {
    rep.labels = std::move(labels);
    rep.n_regions = max_label(rep.labels);
    rep.watershed_pixels = static_cast<std::size_t>(
        std::count(rep.labels.pixels().begin(), rep.labels.pixels().end(), 0));
    rep.region_stats = region_stats(rep.labels);
}

// fg components first, then bg, each in raster order of their first pixel
LabelMap renumber_fg_first(const LabelMap& labels, const BinaryMask& fg, const BinaryMask& bg) {
    const int k = max_label(labels);
    std::vector<std::int32_t> map(static_cast<std::size_t>(k) + 1, 0);
    std::int32_t next = 0;
    for (const BinaryMask* m : {&fg, &bg}) {
        for (std::size_t i = 0; i < labels.size(); ++i) {
            const auto l = labels[i];
            if ((*m)[i] && l > 0 && map[static_cast<std::size_t>(l)] == 0) map[static_cast<std::size_t>(l)] = ++next;
        }
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto l = labels[i];
        if (l > 0 && map[static_cast<std::size_t>(l)] == 0) map[static_cast<std::size_t>(l)] = ++next;
    }
    LabelMap out(labels.width(), labels.height());
    for (std::size_t i = 0; i < labels.size(); ++i) out[i] = map[static_cast<std::size_t>(labels[i])];
    return out;
}

}  // namespace

namespace {

// A foreground marker that meets a background ridge sits between objects, not
// inside one; flooding would also fuse the two into a single basin.
BinaryMask drop_touching(BinaryMask fg, const BinaryMask& bg, Connectivity conn) {
    if (!count_true(bg)) return fg;
    auto [comp, n] = label_components(fg, conn);
    std::vector<std::uint8_t> bad(static_cast<std::size_t>(n) + 1, 0);
    for (int y = 0; y < fg.height(); ++y) {
        for (int x = 0; x < fg.width(); ++x) {
            const auto c = comp(x, y);
            if (!c || bad[c]) continue;
            if (bg(x, y)) {
                bad[c] = 1;
                continue;
            }
            for (const auto& q : neighbors(x, y, fg.width(), fg.height(), conn)) {
                if (bg(q.x, q.y)) {
                    bad[c] = 1;
                    break;
                }
            }
        }
    }
    for (std::size_t i = 0; i < fg.size(); ++i) {
        if (comp[i] && bad[static_cast<std::size_t>(comp[i])]) fg[i] = 0;
    }
    return fg;
}

}  // namespace

SegmentationReport run_modified(const GrayImage& img, const PipelineConfig& cfg) {
    validate(cfg);
    require_finite(img);
    const auto t0 = Clock::now();

    const GrayImage input = cfg.hann_taper ? apply_hann_taper(img, cfg.hann_block) : img;
    const BinaryMask binary = preprocess_binary(input, cfg);
    const GrayImage grad = gradient_magnitude(input);
    const BinaryMask bg = background_markers(binary, cfg);
    const BinaryMask fg = drop_touching(foreground_markers(input, cfg), bg, cfg.conn);
    BinaryMask markers = fg;
    for (std::size_t i = 0; i < markers.size(); ++i) markers[i] = fg[i] || bg[i];

    const GrayImage& relief = cfg.flood_on == FloodOn::Gradient ? grad : input;
    const auto ws = marker_watershed(cfg.flood_on == FloodOn::Raw ? objects_dark(relief, cfg.objects) : relief,
                                     markers, cfg.conn);

    SegmentationReport rep;
    fill_report(rep, renumber_fg_first(ws.labels, fg, bg));
    rep.elapsed_ms = ms_since(t0);
    if (cfg.keep_intermediates) {
        rep.intermediates = Intermediates{input, binary, grad, fg, bg, label_boundaries(rep.labels)};
    }
    return rep;
}

SegmentationReport run_baseline(const GrayImage& img, const PipelineConfig& cfg) {
    validate(cfg);
    require_finite(img);
    const auto t0 = Clock::now();
    const GrayImage grad = gradient_magnitude(img);
    const auto ws = watershed_vs(cfg.flood_on == FloodOn::Gradient ? grad : objects_dark(img, cfg.objects),
                                 cfg.conn);
    SegmentationReport rep;
    fill_report(rep, ws.labels);
    rep.elapsed_ms = ms_since(t0);
    if (cfg.keep_intermediates) {
        rep.intermediates = Intermediates{img, BinaryMask(img.width(), img.height()), grad,
                                          BinaryMask(img.width(), img.height()),
                                          BinaryMask(img.width(), img.height()), label_boundaries(rep.labels)};
    }
    return rep;
}

namespace {

// truth walls that touch a sac, plus pixels where two sacs meet directly
BinaryMask truth_boundaries(const LabelMap& truth) {
    BinaryMask out(truth.width(), truth.height());
    for (int y = 0; y < truth.height(); ++y) {
        for (int x = 0; x < truth.width(); ++x) {
            const auto l = truth(x, y);
            for (const auto& o : neighbor_offsets(Connectivity::Four)) {
                const int nx = x + o.dx, ny = y + o.dy;
                if (!truth.in_bounds(nx, ny)) continue;
                const auto m = truth(nx, ny);
                if (m > 0 && m != l) {
                    out(x, y) = 1;
                    break;
                }
            }
        }
    }
    return out;
}

double matched_fraction(const BinaryMask& a, const BinaryMask& b, double tol) {
    const std::size_t na = count_true(a);
    if (na == 0) return count_true(b) == 0 ? 1.0 : 0.0;
    if (count_true(b) == 0) return 0.0;
    const GrayImage d = distance_transform(b);
    std::size_t hit = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] && d[i] <= tol + 1e-9) ++hit;
    }
    return static_cast<double>(hit) / static_cast<double>(na);
}

}  // namespace

BoundaryScore boundary_f1(const LabelMap& pred, const LabelMap& truth, double tol) {
    require_same_shape(pred, truth, "prediction and truth differ in size");
    const BinaryMask pb = label_boundaries(pred);
    const BinaryMask tb = truth_boundaries(truth);
    BoundaryScore s;
    s.precision = matched_fraction(pb, tb, tol);
    s.recall = matched_fraction(tb, pb, tol);
    s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    return s;
}

double overseg_ratio(const SegmentationReport& report, const LabelMap& truth) {
    require_same_shape(report.labels, truth, "report and truth differ in size");
    const int n_truth = max_label(truth);
    if (n_truth < 1) throw Error(ErrorKind::EmptyMask, "truth has no regions");
    return static_cast<double>(report.n_regions) / static_cast<double>(n_truth);
}

OversegMetrics overseg_metrics(const SegmentationReport& report, const LabelMap& truth) {
    OversegMetrics m;
    m.ratio = overseg_ratio(report, truth);
    m.boundary = boundary_f1(report.labels, truth);
    return m;
}

std::string stats_csv(const SegmentationReport& report) {
    std::ostringstream os;
    os << "label,area_px,cx,cy,x0,y0,x1,y1\n";
    char buf[64];
    for (const auto& r : report.region_stats) {
        os << r.label << ',' << r.area << ',';
        std::snprintf(buf, sizeof buf, "%.3f,%.3f", r.cx, r.cy);
        os << buf << ',' << r.x0 << ',' << r.y0 << ',' << r.x1 << ',' << r.y1 << '\n';
    }
    return os.str();
}

std::string metrics_line(const SegmentationReport& report, const std::optional<OversegMetrics>& m,
                         const std::string& mode, const std::string& source) {
    nlohmann::ordered_json j;
    if (!mode.empty()) j["mode"] = mode;
    if (!source.empty()) j["source"] = source;
    j["n_regions"] = report.n_regions;
    j["watershed_pixels"] = report.watershed_pixels;
    j["elapsed_ms"] = std::round(report.elapsed_ms * 1000.0) / 1000.0;
    if (m) {
        j["overseg_ratio"] = m->ratio;
        j["boundary_f1"] = m->boundary.f1;
    }
    return j.dump();
}

}  // namespace sacseg
