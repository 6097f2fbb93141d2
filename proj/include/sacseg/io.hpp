#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "sacseg/image.hpp"

namespace sacseg {

/// Reads 8/16-bit grayscale PGM (P2/P5) or PNG. Intensities land on [0,255];
/// 16-bit data is rescaled by 255/65535 without rounding.
GrayImage read_gray(const std::filesystem::path& path);

/// Parses PGM content already in memory (same contract as read_gray).
GrayImage parse_pgm(const std::vector<std::uint8_t>& bytes);

/// Reads a 16-bit (or 8-bit) PGM as raw integer labels, no rescaling.
LabelMap read_label_pgm(const std::filesystem::path& path);

/// 8-bit P5; values rounded half-up and clamped to [0,255].
void write_gray_pgm(const GrayImage& img, const std::filesystem::path& path);
/// 8-bit grayscale PNG; values rounded half-up and clamped to [0,255].
void write_gray_png(const GrayImage& img, const std::filesystem::path& path);
void write_mask_png(const BinaryMask& mask, const std::filesystem::path& path);

/// 16-bit P5 of raw label values. Labels above 65535 raise RangeError.
void write_label_pgm(const LabelMap& labels, const std::filesystem::path& path);

using Rgb = std::array<std::uint8_t, 3>;

/// Colour of a label: white for 0, otherwise palette[k mod palette size].
Rgb label_color(std::int32_t label);

/// Interleaved RGB buffer of the colourised label map.
std::vector<std::uint8_t> colorize_labels(const LabelMap& labels);

void write_label_png(const LabelMap& labels, const std::filesystem::path& path);

struct RgbImage {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> data;
};

/// 8-bit PNG decode keeping all channels; used to inspect written files.
RgbImage read_png_raw(const std::filesystem::path& path);

}  // namespace sacseg
