#pragma once

#include <vector>

#include "sacseg/image.hpp"

namespace sacseg {

/// Flat structuring element centred on the origin.
///   square: (2r+1)x(2r+1) block
///   cross:  plus shape, arms of length r
///   disk:   offsets with Euclidean norm <= r
/// Radius 0 is the identity element for every shape.
struct StructuringElement {
    enum class Shape { Square, Cross, Disk };

    Shape shape = Shape::Disk;
    int radius = 1;

    static StructuringElement square(int r) { return {Shape::Square, r}; }
    static StructuringElement cross(int r) { return {Shape::Cross, r}; }
    static StructuringElement disk(int r) { return {Shape::Disk, r}; }

    std::vector<Offset> offsets() const;
};

/// Disk radius used by the marker stage: 5 px at the 900-px reference scale,
/// scaled with min(width, height), never below 1.
int default_marker_radius(int width, int height);

GrayImage complement(const GrayImage& img);

/// Min over the in-bounds window (out-of-bounds acts as +inf).
GrayImage erode(const GrayImage& img, const StructuringElement& se);
/// Max over the in-bounds window (out-of-bounds acts as -inf).
GrayImage dilate(const GrayImage& img, const StructuringElement& se);

/// True where every in-bounds window pixel is true.
BinaryMask erode_mask(const BinaryMask& mask, const StructuringElement& se);

/// Fixed point of g <- min(dilate_conn(g), mask) started at marker.
/// Hybrid raster/anti-raster sweep followed by FIFO propagation.
GrayImage reconstruct_by_dilation(const GrayImage& marker, const GrayImage& mask,
                                  Connectivity conn);
/// Dual of reconstruct_by_dilation; requires marker >= mask.
GrayImage reconstruct_by_erosion(const GrayImage& marker, const GrayImage& mask,
                                 Connectivity conn);

GrayImage open_by_reconstruction(const GrayImage& img, const StructuringElement& se,
                                 Connectivity conn);
GrayImage close_by_reconstruction(const GrayImage& img, const StructuringElement& se,
                                  Connectivity conn);

/// Sets background components that do not touch the border to true; the
/// background is traced with the dual connectivity of `conn`.
BinaryMask fill_holes(const BinaryMask& mask, Connectivity conn);

/// Connected constant plateaus without a strictly lower neighbour.
BinaryMask regional_minima(const GrayImage& img, Connectivity conn);

/// Modifies img so that its regional minima are exactly the components of markers.
GrayImage impose_minima(const GrayImage& img, const BinaryMask& markers, Connectivity conn);

/// Exact Euclidean distance to the nearest true pixel.
GrayImage distance_transform(const BinaryMask& mask);

struct SkizResult {
    /// Influence zone of each marker component (raster-order numbering);
    /// 0 on equidistant tie pixels.
    LabelMap labels;
    /// Tie pixels plus pixels touching a different zone.
    BinaryMask boundary;
};

/// Skeleton by influence zones of the marker components.
SkizResult skiz(const BinaryMask& markers, Connectivity conn);

}  // namespace sacseg
