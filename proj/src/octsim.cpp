#include "sacseg/octsim.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <random>

#include "sacseg/morph.hpp"

namespace sacseg {

std::vector<double> hann1d(int n) {
    if (n < 2) throw Error(ErrorKind::DimensionTooSmall, "Hann window needs at least 2 samples");
    std::vector<double> w(static_cast<std::size_t>(n));
    const double denom = static_cast<double>(n - 1);
    for (int i = 0; i < n; ++i) {
        w[static_cast<std::size_t>(i)] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / denom));
    }
    return w;
}

GrayImage hann2d(int p, int q) {
    if (p < 2 || q < 2) throw Error(ErrorKind::DimensionTooSmall, "Hann window needs P, Q >= 2");
    const auto wx = hann1d(p);
    const auto wy = hann1d(q);
    GrayImage out(p, q);
    for (int j = 0; j < q; ++j) {
        for (int i = 0; i < p; ++i) out(i, j) = wx[static_cast<std::size_t>(i)] * wy[static_cast<std::size_t>(j)];
    }
    return out;
}

namespace {
std::mutex& fftw_planner_mutex() {
    static std::mutex m;  // the FFTW planner is not thread-safe
    return m;
}
}  // namespace

DepthProfile reconstruct_ascan(const SpectralScan& scan, Window window) {
    const int n = static_cast<int>(scan.samples.size());
    if (n < 2) throw Error(ErrorKind::DimensionTooSmall, "A-scan needs at least 2 samples");
    for (double v : scan.samples) {
        if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteSample, "A-scan contains a non-finite sample");
    }

    double* in = fftw_alloc_real(static_cast<std::size_t>(n));
    fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
    }
    std::copy(scan.samples.begin(), scan.samples.end(), in);
    if (window == Window::Hann) {
        const auto w = hann1d(n);
        for (int i = 0; i < n; ++i) in[i] *= w[static_cast<std::size_t>(i)];
    }
    fftw_execute(plan);

    DepthProfile prof;
    prof.magnitudes.resize(static_cast<std::size_t>(n / 2));
    for (int k = 0; k < n / 2; ++k) prof.magnitudes[static_cast<std::size_t>(k)] = std::hypot(out[k][0], out[k][1]);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(out);
    return prof;
}

SpectralScan synth_interferogram(const std::vector<Reflector>& reflectors, int n, double noise_sigma,
                                 std::uint64_t seed) {
    if (n < 2) throw Error(ErrorKind::DimensionTooSmall, "interferogram needs at least 2 samples");
    std::vector<int> seen;
    for (const auto& r : reflectors) {
        if (r.depth_bin < 1 || r.depth_bin > n / 2 - 1) {
            throw Error(ErrorKind::DepthOutOfRange, "reflector depth bin " + std::to_string(r.depth_bin) +
                                                        " outside 1.." + std::to_string(n / 2 - 1));
        }
        if (std::find(seen.begin(), seen.end(), r.depth_bin) != seen.end()) {
            throw Error(ErrorKind::DepthOutOfRange, "duplicate reflector depth bin " + std::to_string(r.depth_bin));
        }
        seen.push_back(r.depth_bin);
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    SpectralScan scan;
    scan.samples.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        double v = 1.0;
        for (const auto& r : reflectors) {
            v += r.amplitude * std::cos(2.0 * std::numbers::pi * r.depth_bin * k / n);
        }
        if (noise_sigma > 0.0) v += noise_sigma * noise(rng);
        scan.samples[static_cast<std::size_t>(k)] = v;
    }
    return scan;
}

int phantom_frame(int width, int height) { return std::max(8, std::min(width, height) / 32); }

namespace {

struct Seed {
    double x, y;
};

// Rejection sampling with a spacing that starts generous and relaxes to 8 px.
std::vector<Seed> place_seeds(int w, int h, int frame, int n, std::mt19937_64& rng) {
    const double lo_x = frame + 4, hi_x = w - frame - 5;
    const double lo_y = frame + 4, hi_y = h - frame - 5;
    if (hi_x <= lo_x || hi_y <= lo_y) return {};
    std::uniform_real_distribution<double> ux(lo_x, hi_x), uy(lo_y, hi_y);
    const double area = (hi_x - lo_x) * (hi_y - lo_y);
    double spacing = std::max(8.0, 0.7 * std::sqrt(area / n));
    for (;;) {
        std::vector<Seed> seeds;
        for (int attempt = 0; attempt < 20000 && static_cast<int>(seeds.size()) < n; ++attempt) {
            const Seed s{ux(rng), uy(rng)};
            bool ok = true;
            for (const auto& o : seeds) {
                if (std::hypot(s.x - o.x, s.y - o.y) < spacing) {
                    ok = false;
                    break;
                }
            }
            if (ok) seeds.push_back(s);
        }
        if (static_cast<int>(seeds.size()) == n) return seeds;
        if (spacing <= 8.0) return {};
        spacing = std::max(8.0, spacing * 0.8);
    }
}

}  // namespace

Phantom synth_phantom(const PhantomParams& params) {
    const int w = params.width;
    const int h = params.height;
    if (w <= 0 || h <= 0) throw Error(ErrorKind::ZeroDimension, "phantom dimensions must be positive");
    if (params.n_sacs < 1) throw Error(ErrorKind::TooManySacs, "phantom needs at least one sac");
    if (params.speckle_sigma < 0.0) throw Error(ErrorKind::RangeError, "speckle sigma must be non-negative");

    std::mt19937_64 rng(params.seed);
    const int frame = phantom_frame(w, h);
    const auto seeds = place_seeds(w, h, frame, params.n_sacs, rng);
    if (seeds.empty()) {
        throw Error(ErrorKind::TooManySacs, "cannot place " + std::to_string(params.n_sacs) +
                                                " sacs 8 px apart in " + std::to_string(w) + "x" +
                                                std::to_string(h));
    }

    // each seed is a small random ellipse; its influence zone becomes the sac
    std::uniform_real_distribution<double> radius(1.5, 3.5), angle(0.0, std::numbers::pi);
    BinaryMask seed_mask(w, h);
    for (const auto& s : seeds) {
        const double a = radius(rng), b = radius(rng), t = angle(rng);
        const double c = std::cos(t), sn = std::sin(t);
        for (int y = static_cast<int>(s.y) - 4; y <= static_cast<int>(s.y) + 4; ++y) {
            for (int x = static_cast<int>(s.x) - 4; x <= static_cast<int>(s.x) + 4; ++x) {
                if (!seed_mask.in_bounds(x, y)) continue;
                const double dx = x - s.x, dy = y - s.y;
                const double u = (dx * c + dy * sn) / a, v = (-dx * sn + dy * c) / b;
                if (u * u + v * v <= 1.0) seed_mask(x, y) = 1;
            }
        }
        seed_mask(static_cast<int>(s.x), static_cast<int>(s.y)) = 1;
    }
    // Ellipses of close seeds could touch; the zones would then merge.
    if (label_components(seed_mask, Connectivity::Four).second != params.n_sacs) {
        throw Error(ErrorKind::TooManySacs, "sac seeds overlap");
    }

    const auto zones = skiz(seed_mask, Connectivity::Four);
    LabelMap truth(w, h, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (x < frame || y < frame || x >= w - frame || y >= h - frame) continue;
            const auto l = zones.labels(x, y);
            if (l <= 0) continue;
            bool wall = false;
            for (const auto& o : neighbor_offsets(Connectivity::Four)) {
                const int nx = x + o.dx, ny = y + o.dy;
                if (!zones.labels.in_bounds(nx, ny)) continue;
                const auto m = zones.labels(nx, ny);
                if (m != l) {  // ties (0) and foreign zones both make walls
                    wall = true;
                    break;
                }
            }
            if (!wall) truth(x, y) = l;
        }
    }

    // keep only the largest 4-connected piece of each sac
    for (int k = 1; k <= params.n_sacs; ++k) {
        BinaryMask piece(w, h);
        for (std::size_t i = 0; i < truth.size(); ++i) piece[i] = truth[i] == k;
        auto [comp, n] = label_components(piece, Connectivity::Four);
        if (n == 0) throw Error(ErrorKind::TooManySacs, "sac " + std::to_string(k) + " vanished");
        if (n == 1) continue;
        std::vector<std::size_t> area(static_cast<std::size_t>(n) + 1, 0);
        for (std::size_t i = 0; i < comp.size(); ++i) ++area[static_cast<std::size_t>(comp[i])];
        const auto best = std::max_element(area.begin() + 1, area.end()) - area.begin();
        for (std::size_t i = 0; i < comp.size(); ++i) {
            if (comp[i] > 0 && comp[i] != best) truth[i] = 0;
        }
    }

    Phantom ph;
    ph.n_sacs = params.n_sacs;
    ph.seed = params.seed;
    ph.image = GrayImage(w, h);
    std::normal_distribution<double> speckle(0.0, 1.0);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        double v = truth[i] > 0 ? params.sac_intensity : params.wall_intensity;
        if (params.speckle_sigma > 0.0) v *= 1.0 + params.speckle_sigma * speckle(rng);
        // 8-bit levels, like an acquired B-scan and the PGM we write
        ph.image[i] = std::floor(std::clamp(v, 0.0, 255.0) + 0.5);
    }
    ph.truth = std::move(truth);
    return ph;
}

}  // namespace sacseg
