#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "xray/errors.hpp"

namespace xray {

// Row-major single-channel raster on the workspace pixel grid.
template <typename T>
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<T> data;

    Raster() = default;
    Raster(int w, int h, T fill = T{})
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    std::size_t size() const { return data.size(); }

    T& at(int x, int y) { return data[idx(x, y)]; }
    const T& at(int x, int y) const { return data[idx(x, y)]; }
    T& operator[](std::size_t i) { return data[i]; }
    const T& operator[](std::size_t i) const { return data[i]; }

    bool in_bounds(int x, int y) const {
        return static_cast<unsigned>(x) < static_cast<unsigned>(width) &&
               static_cast<unsigned>(y) < static_cast<unsigned>(height);
    }

    template <typename U>
    bool same_shape(const Raster<U>& other) const {
        return width == other.width && height == other.height;
    }

    friend bool operator==(const Raster& a, const Raster& b) {
        return a.width == b.width && a.height == b.height && a.data == b.data;
    }

private:
    std::size_t idx(int x, int y) const {
        return static_cast<std::size_t>(y) * width + x;
    }
};

using Mask = Raster<std::uint8_t>;
using HeightField = Raster<float>;

inline std::size_t mask_area(const Mask& m) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < m.size(); ++i) n += (m[i] != 0);
    return n;
}

inline bool mask_empty(const Mask& m) { return mask_area(m) == 0; }

// |a AND b| / |a OR b|; 1.0 when both masks are empty.
inline double mask_iou(const Mask& a, const Mask& b) {
    if (!a.same_shape(b)) throw DimensionMismatch("mask_iou: shape mismatch");
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool pa = a[i] != 0, pb = b[i] != 0;
        inter += (pa && pb);
        uni += (pa || pb);
    }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

// Overhead depth raster; empty pixels read camera_height - floor_height.
struct DepthImage {
    Raster<float> values;
    float camera_height = 0.8f;
};

}  // namespace xray
