#include "sacseg/io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>

namespace sacseg {

namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
        throw Error(ErrorKind::FileNotFound, path.string());
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::FileNotFound, path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint8_t to_byte(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

class PgmReader {
public:
    explicit PgmReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    // Next whitespace-delimited token, skipping '#' comments.
    std::string token() {
        for (;;) {
            while (pos_ < bytes_.size() && std::isspace(bytes_[pos_])) ++pos_;
            if (pos_ < bytes_.size() && bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
                continue;
            }
            break;
        }
        std::string out;
        while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_]) && bytes_[pos_] != '#') {
            out.push_back(static_cast<char>(bytes_[pos_++]));
        }
        return out;
    }

    long number(const char* what) {
        const std::string t = token();
        if (t.empty() || !std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(c); })) {
            throw Error(ErrorKind::UnsupportedFormat, std::string("malformed PGM ") + what);
        }
        return std::stol(t);
    }

    // Exactly one whitespace byte separates the header from P5 payload.
    void skip_single_space() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
            throw Error(ErrorKind::UnsupportedFormat, "malformed PGM header");
        }
        ++pos_;
    }

    std::size_t pos() const { return pos_; }

private:
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

bool is_png(const std::vector<std::uint8_t>& bytes) {
    return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

struct PngReadCtx {
    const std::vector<std::uint8_t>* bytes;
    std::size_t pos;
};

void png_read_mem(png_structp png, png_bytep out, png_size_t n) {
    auto* ctx = static_cast<PngReadCtx*>(png_get_io_ptr(png));
    if (ctx->pos + n > ctx->bytes->size()) {
        png_error(png, "truncated PNG");
    }
    std::copy_n(ctx->bytes->data() + ctx->pos, n, out);
    ctx->pos += n;
}

struct DecodedPng {
    int width = 0;
    int height = 0;
    int channels = 0;
    int bit_depth = 0;
    int color_type = 0;
    std::vector<std::uint8_t> data;  // rows, big-endian for 16-bit
};

DecodedPng decode_png(const std::vector<std::uint8_t>& bytes, bool keep_16) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error(ErrorKind::IoError, "png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error(ErrorKind::IoError, "png_create_info_struct failed");
    }
    DecodedPng out;
    PngReadCtx ctx{&bytes, 0};
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(ErrorKind::UnsupportedFormat, "corrupt PNG stream");
    }
    png_set_read_fn(png, &ctx, png_read_mem);
    png_read_info(png, info);
    out.color_type = png_get_color_type(png, info);
    out.bit_depth = png_get_bit_depth(png, info);
    if (out.color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (out.color_type == PNG_COLOR_TYPE_GRAY && out.bit_depth < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
    }
    if (!keep_16 && out.bit_depth == 16) png_set_strip_16(png);
    png_read_update_info(png, info);
    out.width = static_cast<int>(png_get_image_width(png, info));
    out.height = static_cast<int>(png_get_image_height(png, info));
    out.channels = png_get_channels(png, info);
    const int depth = png_get_bit_depth(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    out.data.resize(rowbytes * static_cast<std::size_t>(out.height));
    rows.resize(static_cast<std::size_t>(out.height));
    for (int y = 0; y < out.height; ++y) {
        rows[static_cast<std::size_t>(y)] = out.data.data() + rowbytes * static_cast<std::size_t>(y);
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    out.bit_depth = depth;
    return out;
}

GrayImage gray_from_png(const std::vector<std::uint8_t>& bytes) {
    DecodedPng png = decode_png(bytes, true);
    if (png.color_type != PNG_COLOR_TYPE_GRAY && png.color_type != PNG_COLOR_TYPE_GRAY_ALPHA) {
        throw Error(ErrorKind::UnsupportedFormat, "colour PNG input (grayscale required)");
    }
    if (png.width <= 0 || png.height <= 0) {
        throw Error(ErrorKind::ZeroDimension, "PNG has zero dimension");
    }
    GrayImage img(png.width, png.height);
    const std::size_t stride_px = static_cast<std::size_t>(png.channels);
    for (std::size_t i = 0; i < img.size(); ++i) {
        if (png.bit_depth == 16) {
            const std::size_t b = i * stride_px * 2;
            const unsigned v = (static_cast<unsigned>(png.data[b]) << 8) | png.data[b + 1];
            img[i] = static_cast<double>(v) * 255.0 / 65535.0;
        } else {
            img[i] = png.data[i * stride_px];
        }
    }
    return img;
}

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};

void write_png(const std::filesystem::path& path, int width, int height, int color_type,
               int bit_depth, const std::vector<std::uint8_t>& data) {
    std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) throw Error(ErrorKind::IoError, "cannot open for writing: " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error(ErrorKind::IoError, "png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error(ErrorKind::IoError, "png_create_info_struct failed");
    }
    const int channels = color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
    const std::size_t rowbytes =
        static_cast<std::size_t>(width) * static_cast<std::size_t>(channels * bit_depth / 8);
    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y) {
        rows[static_cast<std::size_t>(y)] =
            const_cast<png_bytep>(data.data() + rowbytes * static_cast<std::size_t>(y));
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error(ErrorKind::IoError, "PNG encode failed: " + path.string());
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
                 bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void write_bytes(const std::filesystem::path& path, const std::string& header,
                 const std::vector<std::uint8_t>& payload) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot open for writing: " + path.string());
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size()));
    if (!out) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

// Returns raw integer samples plus maxval.
std::pair<Grid<std::uint16_t>, long> decode_pgm(const std::vector<std::uint8_t>& bytes) {
    PgmReader r(bytes);
    const std::string magic = r.token();
    if (magic != "P2" && magic != "P5") {
        throw Error(ErrorKind::UnsupportedFormat, "not a grayscale PGM (magic '" + magic + "')");
    }
    const long w = r.number("width");
    const long h = r.number("height");
    const long maxval = r.number("maxval");
    if (w == 0 || h == 0) throw Error(ErrorKind::ZeroDimension, "PGM has zero dimension");
    if (maxval <= 0 || maxval > 65535) {
        throw Error(ErrorKind::UnsupportedFormat, "PGM maxval out of range");
    }
    Grid<std::uint16_t> raw(static_cast<int>(w), static_cast<int>(h));
    if (magic == "P2") {
        for (std::size_t i = 0; i < raw.size(); ++i) {
            const long v = r.number("sample");
            if (v > maxval) throw Error(ErrorKind::UnsupportedFormat, "PGM sample exceeds maxval");
            raw[i] = static_cast<std::uint16_t>(v);
        }
    } else {
        r.skip_single_space();
        const std::size_t bps = maxval > 255 ? 2 : 1;
        std::size_t pos = r.pos();
        if (bytes.size() < pos + raw.size() * bps) {
            throw Error(ErrorKind::UnsupportedFormat, "truncated PGM payload");
        }
        for (std::size_t i = 0; i < raw.size(); ++i) {
            unsigned v = bytes[pos++];
            if (bps == 2) v = (v << 8) | bytes[pos++];
            if (static_cast<long>(v) > maxval) {
                throw Error(ErrorKind::UnsupportedFormat, "PGM sample exceeds maxval");
            }
            raw[i] = static_cast<std::uint16_t>(v);
        }
    }
    return {std::move(raw), maxval};
}

}  // namespace

GrayImage parse_pgm(const std::vector<std::uint8_t>& bytes) {
    auto [raw, maxval] = decode_pgm(bytes);
    GrayImage img(raw.width(), raw.height());
    const double scale = maxval > 255 ? 255.0 / 65535.0 : 1.0;
    for (std::size_t i = 0; i < raw.size(); ++i) img[i] = raw[i] * scale;
    return img;
}

GrayImage read_gray(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    if (is_png(bytes)) return gray_from_png(bytes);
    return parse_pgm(bytes);
}

LabelMap read_label_pgm(const std::filesystem::path& path) {
    auto [raw, maxval] = decode_pgm(read_file(path));
    (void)maxval;
    LabelMap labels(raw.width(), raw.height());
    for (std::size_t i = 0; i < raw.size(); ++i) labels[i] = raw[i];
    return labels;
}

void write_gray_pgm(const GrayImage& img, const std::filesystem::path& path) {
    std::vector<std::uint8_t> payload(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) payload[i] = to_byte(img[i]);
    write_bytes(path,
                "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n",
                payload);
}

void write_gray_png(const GrayImage& img, const std::filesystem::path& path) {
    std::vector<std::uint8_t> payload(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) payload[i] = to_byte(img[i]);
    write_png(path, img.width(), img.height(), PNG_COLOR_TYPE_GRAY, 8, payload);
}

void write_mask_png(const BinaryMask& mask, const std::filesystem::path& path) {
    std::vector<std::uint8_t> payload(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) payload[i] = mask[i] ? 255 : 0;
    write_png(path, mask.width(), mask.height(), PNG_COLOR_TYPE_GRAY, 8, payload);
}

void write_label_pgm(const LabelMap& labels, const std::filesystem::path& path) {
    std::vector<std::uint8_t> payload(labels.size() * 2);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto v = labels[i];
        if (v < 0 || v > 65535) {
            throw Error(ErrorKind::RangeError, "label " + std::to_string(v) + " does not fit 16 bits");
        }
        payload[2 * i] = static_cast<std::uint8_t>(v >> 8);
        payload[2 * i + 1] = static_cast<std::uint8_t>(v & 0xff);
    }
    write_bytes(path,
                "P5\n" + std::to_string(labels.width()) + " " + std::to_string(labels.height()) +
                    "\n65535\n",
                payload);
}

Rgb label_color(std::int32_t label) {
    // Qualitative palette; none of the entries is white.
    static constexpr std::array<Rgb, 20> kPalette{{
        {31, 119, 180},  {255, 127, 14},  {44, 160, 44},   {214, 39, 40},   {148, 103, 189},
        {140, 86, 75},   {227, 119, 194}, {127, 127, 127}, {188, 189, 34},  {23, 190, 207},
        {174, 199, 232}, {255, 187, 120}, {152, 223, 138}, {255, 152, 150}, {197, 176, 213},
        {196, 156, 148}, {247, 182, 210}, {66, 66, 66},    {219, 219, 141}, {158, 218, 229},
    }};
    if (label <= 0) return {255, 255, 255};
    return kPalette[static_cast<std::size_t>(label) % kPalette.size()];
}

std::vector<std::uint8_t> colorize_labels(const LabelMap& labels) {
    std::vector<std::uint8_t> rgb(labels.size() * 3);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const Rgb c = label_color(labels[i]);
        std::copy(c.begin(), c.end(), rgb.begin() + static_cast<std::ptrdiff_t>(3 * i));
    }
    return rgb;
}

void write_label_png(const LabelMap& labels, const std::filesystem::path& path) {
    write_png(path, labels.width(), labels.height(), PNG_COLOR_TYPE_RGB, 8, colorize_labels(labels));
}

RgbImage read_png_raw(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    if (!is_png(bytes)) throw Error(ErrorKind::UnsupportedFormat, "not a PNG: " + path.string());
    DecodedPng png = decode_png(bytes, false);
    return {png.width, png.height, png.channels, std::move(png.data)};
}

}  // namespace sacseg
