#include "sacseg/contour.hpp"

#include <algorithm>
#include <cmath>

#include "sacseg/grid_cut.hpp"

namespace sacseg {

GrayImage normalize_unit(const GrayImage& img) {
    const auto [lo, hi] = std::minmax_element(img.pixels().begin(), img.pixels().end());
    const double a = *lo;
    const double range = *hi - *lo;
    GrayImage out(img.width(), img.height(), 0.0);
    if (range <= 0.0) return out;
    for (std::size_t i = 0; i < img.size(); ++i) out[i] = (img[i] - a) / range;
    return out;
}

double chan_vese_energy(const GrayImage& img, const BinaryMask& mask, const ChanVeseParams& params) {
    double sum_in = 0.0, sum_out = 0.0;
    std::size_t n_in = 0, n_out = 0;
    for (std::size_t i = 0; i < img.size(); ++i) {
        if (mask[i]) {
            sum_in += img[i];
            ++n_in;
        } else {
            sum_out += img[i];
            ++n_out;
        }
    }
    const double c1 = n_in ? sum_in / static_cast<double>(n_in) : 0.0;
    const double c2 = n_out ? sum_out / static_cast<double>(n_out) : 0.0;
    double fid = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double d = mask[i] ? img[i] - c1 : img[i] - c2;
        fid += (mask[i] ? params.lambda1 : params.lambda2) * d * d;
    }
    std::size_t edges = 0;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (x + 1 < mask.width() && mask(x, y) != mask(x + 1, y)) ++edges;
            if (y + 1 < mask.height() && mask(x, y) != mask(x, y + 1)) ++edges;
        }
    }
    return params.mu * static_cast<double>(edges) + fid;
}

ChanVeseResult chan_vese_run(const GrayImage& img, const BinaryMask& init,
                             const ChanVeseParams& params) {
    require_same_shape(img, init, "chan_vese image and init differ in size");
    require_finite(img);
    const std::size_t n_true = count_true(init);
    if (n_true == 0 || n_true == init.size()) {
        throw Error(ErrorKind::DegenerateInit, "init mask must contain both phases");
    }

    const GrayImage u = normalize_unit(img);
    const int w = u.width();
    const int h = u.height();

    ChanVeseResult res;
    res.mask = init;
    res.energy.push_back(chan_vese_energy(u, init, params));

    for (int it = 1; it <= params.max_iters; ++it) {
        double s1 = 0.0, s2 = 0.0;
        std::size_t n1 = 0, n2 = 0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (res.mask[i]) {
                s1 += u[i];
                ++n1;
            } else {
                s2 += u[i];
                ++n2;
            }
        }
        if (n1 == 0 || n2 == 0) break;  // one phase vanished last round
        const double c1 = s1 / static_cast<double>(n1);
        const double c2 = s2 / static_cast<double>(n2);
        res.c1 = c1;
        res.c2 = c2;

        // means fixed -> the partition step is an exact binary min-cut
        GridCut cut(w, h, params.mu);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const double v = u(x, y);
                cut.set_unary(x, y, params.lambda2 * (v - c2) * (v - c2),
                              params.lambda1 * (v - c1) * (v - c1));
            }
        }
        cut.solve();
        const auto next = cut.labels();

        std::size_t changed = 0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (next[i] != res.mask[i]) ++changed;
            res.mask[i] = next[i];
        }
        res.iterations = it;
        res.energy.push_back(chan_vese_energy(u, res.mask, params));
        if (static_cast<double>(changed) / static_cast<double>(u.size()) < params.tol) break;
    }
    return res;
}

BinaryMask chan_vese(const GrayImage& img, const BinaryMask& init, const ChanVeseParams& params) {
    return chan_vese_run(img, init, params).mask;
}

}  // namespace sacseg
