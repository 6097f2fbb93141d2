#pragma once

#include <vector>

#include "sacseg/image.hpp"

namespace sacseg {

struct ChanVeseParams {
    double mu = 0.25;       ///< length penalty
    double lambda1 = 1.0;   ///< inside fidelity
    double lambda2 = 1.0;   ///< outside fidelity
    int max_iters = 200;
    double tol = 1e-3;      ///< stop when the changed-pixel fraction drops below this
};

struct ChanVeseResult {
    BinaryMask mask;
    double c1 = 0.0;  ///< mean inside, on the normalised [0,1] scale
    double c2 = 0.0;  ///< mean outside
    int iterations = 0;
    /// Piecewise-constant energy of the init mask followed by one entry per iteration.
    std::vector<double> energy;
};

/// Min-max normalisation to [0,1]; a constant image maps to all zeros.
GrayImage normalize_unit(const GrayImage& img);

/// Two-phase piecewise-constant energy of a partition, with c1/c2 set to the
/// region means: mu * (boundary edge count) + lambda1 * sum_in (I - c1)^2
/// + lambda2 * sum_out (I - c2)^2. img must already be on [0,1].
double chan_vese_energy(const GrayImage& img, const BinaryMask& mask, const ChanVeseParams& params);

/// Two-phase Chan-Vese refinement of init. Alternates the region means with an
/// exact min-cut of the partition for fixed means, so the energy never rises.
/// Returns the inside (c1) region.
ChanVeseResult chan_vese_run(const GrayImage& img, const BinaryMask& init,
                             const ChanVeseParams& params = {});

BinaryMask chan_vese(const GrayImage& img, const BinaryMask& init,
                     const ChanVeseParams& params = {});

}  // namespace sacseg
