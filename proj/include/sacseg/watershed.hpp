#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sacseg/image.hpp"

namespace sacseg {

struct WatershedResult {
    LabelMap labels;
    int n_basins = 0;
    std::size_t watershed_pixels = 0;
};

/// Integer working levels 0..255: clamp to [0,255], then round half up.
Grid<std::uint8_t> quantize_levels(const GrayImage& img);

/// Sobel magnitude sqrt(Gx^2 + Gy^2) with edge-replicated borders, not rescaled.
GrayImage gradient_magnitude(const GrayImage& img);

/// Sorted-pixel immersion watershed of img itself (no implicit gradient).
///
/// Levels are processed in increasing order. At each level the pixels of that
/// level, together with the watershed pixels left by earlier levels, are
/// flooded breadth-first from the existing basins; a pixel reached at the same
/// geodesic distance from two different basins becomes a watershed pixel (0).
/// Parts of the level unreachable from any basin start new basins. Basins are
/// numbered 1..K in raster order of the first pixel of their minimum.
WatershedResult watershed_vs(const GrayImage& img, Connectivity conn = Connectivity::Four);

/// Literal threshold-set recursion: per level, one geodesic distance map per
/// basin inside T_R, strict-nearest assignment, ties stay unassigned. Slow;
/// for verification only. Images above 64x64 raise ImageTooLarge.
WatershedResult flooding_oracle(const GrayImage& img, Connectivity conn = Connectivity::Four);

/// watershed_vs(impose_minima(img, markers)). Basin k holds marker component k.
WatershedResult marker_watershed(const GrayImage& img, const BinaryMask& markers,
                                 Connectivity conn = Connectivity::Four);

/// Nested threshold sets T_R = {p : level(p) <= R} over the levels present.
struct FloodLevelSets {
    std::vector<int> levels;
    std::vector<BinaryMask> threshold_sets;
};

FloodLevelSets flood_level_sets(const GrayImage& img);

/// True when both label maps have the same zero set and the same partition
/// of the remaining pixels (a consistent bijection between labels).
bool same_partition(const LabelMap& a, const LabelMap& b);

}  // namespace sacseg
