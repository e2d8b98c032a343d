#pragma once

#include <zlib.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "xray/errors.hpp"
#include "xray/raster.hpp"

// Minimal grayscale PNG support, enough for mask / depth / distribution
// dumps: color type 0, bit depth 8 or 16, no interlacing, filter 0 rows.

namespace xray {
namespace detail {

inline void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

inline std::uint32_t get_be32(const std::uint8_t* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) |
           (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | p[3];
}

inline void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                         const std::vector<std::uint8_t>& data) {
    put_be32(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t type_at = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const std::uint32_t crc = static_cast<std::uint32_t>(
        ::crc32(0, out.data() + type_at, static_cast<uInt>(4 + data.size())));
    put_be32(out, crc);
}

inline std::vector<std::uint8_t> zlib_deflate(const std::vector<std::uint8_t>& raw) {
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> out(bound);
    if (compress2(out.data(), &bound, raw.data(), static_cast<uLong>(raw.size()),
                  Z_BEST_SPEED) != Z_OK)
        throw FormatError("deflate failed");
    out.resize(bound);
    return out;
}

inline std::vector<std::uint8_t> encode_gray_png(int width, int height, int bit_depth,
                                                 const std::vector<std::uint8_t>& rows) {
    static const std::uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    std::vector<std::uint8_t> png(sig, sig + 8);
    std::vector<std::uint8_t> ihdr;
    put_be32(ihdr, static_cast<std::uint32_t>(width));
    put_be32(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(static_cast<std::uint8_t>(bit_depth));
    ihdr.push_back(0);  // grayscale
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);
    append_chunk(png, "IHDR", ihdr);
    append_chunk(png, "IDAT", zlib_deflate(rows));
    append_chunk(png, "IEND", {});
    return png;
}

inline void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw FormatError("cannot open for write: " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!f) throw FormatError("short write: " + path);
}

}  // namespace detail

inline void write_png_gray8(const std::string& path, const Raster<std::uint8_t>& img) {
    std::vector<std::uint8_t> rows;
    rows.reserve(static_cast<std::size_t>(img.height) * (1 + img.width));
    for (int y = 0; y < img.height; ++y) {
        rows.push_back(0);  // filter: none
        for (int x = 0; x < img.width; ++x) rows.push_back(img.at(x, y));
    }
    detail::write_file(path, detail::encode_gray_png(img.width, img.height, 8, rows));
}

inline void write_png_gray16(const std::string& path, const Raster<std::uint16_t>& img) {
    std::vector<std::uint8_t> rows;
    rows.reserve(static_cast<std::size_t>(img.height) * (1 + 2 * img.width));
    for (int y = 0; y < img.height; ++y) {
        rows.push_back(0);
        for (int x = 0; x < img.width; ++x) {
            const std::uint16_t v = img.at(x, y);
            rows.push_back(static_cast<std::uint8_t>(v >> 8));
            rows.push_back(static_cast<std::uint8_t>(v & 0xff));
        }
    }
    detail::write_file(path, detail::encode_gray_png(img.width, img.height, 16, rows));
}

// Binary mask as 0/255, distribution values as round(v * 255).
inline void write_mask_png(const std::string& path, const Mask& mask) {
    Raster<std::uint8_t> img(mask.width, mask.height);
    for (std::size_t i = 0; i < mask.size(); ++i) img[i] = mask[i] ? 255 : 0;
    write_png_gray8(path, img);
}

inline void write_distribution_png(const std::string& path, const Raster<float>& values) {
    Raster<std::uint8_t> img(values.width, values.height);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const float v = values[i] < 0.0f ? 0.0f : (values[i] > 1.0f ? 1.0f : values[i]);
        img[i] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
    }
    write_png_gray8(path, img);
}

// Depth in meters quantized at kDepthScale meters per unit (0.1 mm); the
// scale is recorded in a sidecar next to the image.
inline constexpr double kDepthScale = 1e-4;

inline void write_depth_png(const std::string& path, const Raster<float>& depth) {
    Raster<std::uint16_t> img(depth.width, depth.height);
    for (std::size_t i = 0; i < depth.size(); ++i) {
        const double units = std::floor(depth[i] / kDepthScale + 0.5);
        img[i] = static_cast<std::uint16_t>(units < 0 ? 0 : (units > 65535 ? 65535 : units));
    }
    write_png_gray16(path, img);
    std::ofstream side(path + ".json", std::ios::trunc);
    side << "{\"scale_m_per_unit\": " << kDepthScale << "}\n";
}

// Reader for the subset this writer produces (round-trip checks and the
// inspect command); anything fancier is rejected.
inline Raster<std::uint16_t> read_png_gray(const std::string& path, int* bit_depth_out) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    static const std::uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    if (bytes.size() < 8 || std::memcmp(bytes.data(), sig, 8) != 0)
        throw FormatError("not a png: " + path);

    int width = 0, height = 0, bit_depth = 0;
    std::vector<std::uint8_t> idat;
    std::size_t at = 8;
    while (at + 12 <= bytes.size()) {
        const std::uint32_t len = detail::get_be32(&bytes[at]);
        if (at + 12 + len > bytes.size()) throw FormatError("truncated png chunk");
        const char* type = reinterpret_cast<const char*>(&bytes[at + 4]);
        const std::uint8_t* data = &bytes[at + 8];
        if (std::memcmp(type, "IHDR", 4) == 0) {
            if (len != 13) throw FormatError("bad IHDR");
            width = static_cast<int>(detail::get_be32(data));
            height = static_cast<int>(detail::get_be32(data + 4));
            bit_depth = data[8];
            if (data[9] != 0 || data[12] != 0)
                throw FormatError("unsupported png layout");
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), data, data + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            break;
        }
        at += 12 + len;
    }
    if (width <= 0 || height <= 0 || (bit_depth != 8 && bit_depth != 16))
        throw FormatError("unsupported png header");

    const std::size_t bpp = bit_depth == 16 ? 2 : 1;
    const std::size_t row_bytes = 1 + bpp * static_cast<std::size_t>(width);
    std::vector<std::uint8_t> raw(row_bytes * static_cast<std::size_t>(height));
    uLongf raw_len = static_cast<uLongf>(raw.size());
    if (uncompress(raw.data(), &raw_len, idat.data(), static_cast<uLong>(idat.size())) !=
            Z_OK ||
        raw_len != raw.size())
        throw FormatError("png inflate failed");

    Raster<std::uint16_t> img(width, height);
    for (int y = 0; y < height; ++y) {
        const std::uint8_t* row = raw.data() + static_cast<std::size_t>(y) * row_bytes;
        if (row[0] != 0) throw FormatError("unsupported png filter");
        for (int x = 0; x < width; ++x) {
            img.at(x, y) = bit_depth == 16
                               ? static_cast<std::uint16_t>((row[1 + 2 * x] << 8) |
                                                            row[2 + 2 * x])
                               : row[1 + x];
        }
    }
    if (bit_depth_out) *bit_depth_out = bit_depth;
    return img;
}

}  // namespace xray
