#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sacseg/contour.hpp"
#include "sacseg/image.hpp"

namespace sacseg {

enum class FloodOn { Gradient, Raw };
enum class Objects { Dark, Bright };

struct PipelineConfig {
    double threshold = 245.0;
    int fg_se_radius = 0;  ///< 0 = scale with the image (default_marker_radius)
    Connectivity conn = Connectivity::Four;
    bool hann_taper = false;
    int hann_block = 0;  ///< taper tile size; 0 = one window over the full image
    ChanVeseParams chan_vese;
    FloodOn flood_on = FloodOn::Gradient;
    Objects objects = Objects::Dark;
    bool keep_intermediates = false;
};

/// Throws RangeError on out-of-range fields.
void validate(const PipelineConfig& cfg);

struct RegionStats {
    int label = 0;
    std::size_t area = 0;
    double cx = 0.0, cy = 0.0;
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // inclusive bounding box
};

struct Intermediates {
    GrayImage input;  ///< after the optional taper
    BinaryMask binary;
    GrayImage gradient;
    BinaryMask fg_markers;
    BinaryMask bg_markers;
    BinaryMask watershed_lines;
};

struct SegmentationReport {
    LabelMap labels;
    int n_regions = 0;
    std::size_t watershed_pixels = 0;
    std::vector<RegionStats> region_stats;
    double elapsed_ms = 0.0;
    std::optional<Intermediates> intermediates;
};

/// Multiplies by hann2d over tiles of block x block pixels (block 0 = whole image).
GrayImage apply_hann_taper(const GrayImage& img, int block);

GrayImage objects_dark(const GrayImage& img, Objects objects);

/// threshold -> fill holes -> Chan-Vese. Returns the object phase.
BinaryMask preprocess_binary(const GrayImage& img, const PipelineConfig& cfg);
BinaryMask foreground_markers(const GrayImage& img, const PipelineConfig& cfg);
BinaryMask background_markers(const BinaryMask& binary, const PipelineConfig& cfg);

SegmentationReport run_modified(const GrayImage& img, const PipelineConfig& cfg = {});
SegmentationReport run_baseline(const GrayImage& img, const PipelineConfig& cfg = {});

/// Label-0 pixels plus pixels with a 4-neighbour carrying a different positive label.
BinaryMask label_boundaries(const LabelMap& labels);

std::vector<RegionStats> region_stats(const LabelMap& labels);

struct BoundaryScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Boundary pixels of pred vs those of truth, each matched within tol pixels
/// (Euclidean). An empty side scores 1 only when the other is empty too.
BoundaryScore boundary_f1(const LabelMap& pred, const LabelMap& truth, double tol = 2.0);

struct OversegMetrics {
    double ratio = 0.0;
    BoundaryScore boundary;
};

double overseg_ratio(const SegmentationReport& report, const LabelMap& truth);
OversegMetrics overseg_metrics(const SegmentationReport& report, const LabelMap& truth);

/// CSV with header label,area_px,cx,cy,x0,y0,x1,y1.
std::string stats_csv(const SegmentationReport& report);

/// One-line JSON object: n_regions, watershed_pixels, elapsed_ms[, overseg_ratio, boundary_f1].
std::string metrics_line(const SegmentationReport& report, const std::optional<OversegMetrics>& m = std::nullopt,
                         const std::string& mode = "", const std::string& source = "");

}  // namespace sacseg
