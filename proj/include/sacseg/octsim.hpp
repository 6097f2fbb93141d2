#pragma once

#include <cstdint>
#include <vector>

#include "sacseg/image.hpp"

namespace sacseg {

/// One A-scan before reconstruction: detector samples at evenly spaced wavenumbers.
struct SpectralScan {
    std::vector<double> samples;
};

/// Magnitudes of DFT bins 0..N/2-1 (DC at index 0).
struct DepthProfile {
    std::vector<double> magnitudes;
};

enum class Window { None, Hann };

struct Reflector {
    int depth_bin = 1;
    double amplitude = 1.0;
};

struct PhantomParams {
    int width = 512;
    int height = 512;
    int n_sacs = 12;
    double wall_intensity = 220.0;
    double sac_intensity = 40.0;
    double speckle_sigma = 0.25;
    std::uint64_t seed = 42;
};

struct Phantom {
    GrayImage image;
    LabelMap truth;  // 0 = walls / frame
    int n_sacs = 0;
    std::uint64_t seed = 0;
};

/// w(n) = 1/2 (1 - cos(2 pi n / (N-1))).
std::vector<double> hann1d(int n);

/// Eq. 3 taper, P columns by Q rows: W(i,j) = hann1d(P)(i) * hann1d(Q)(j).
GrayImage hann2d(int p, int q);

DepthProfile reconstruct_ascan(const SpectralScan& scan, Window window);

/// samples(k) = 1 + sum_r a_r cos(2 pi f_r k / N) + N(0, sigma).
SpectralScan synth_interferogram(const std::vector<Reflector>& reflectors, int n,
                                 double noise_sigma, std::uint64_t seed);

/// Dark sacs separated by bright 2-px walls (the SKIZ of random seeds),
/// inside a thick bright rind, with clamped multiplicative speckle.
Phantom synth_phantom(const PhantomParams& params);

/// Rind thickness used by synth_phantom.
int phantom_frame(int width, int height);

}  // namespace sacseg
