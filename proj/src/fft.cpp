#include "tilediff/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "tilediff/error.hpp"

namespace tilediff {

namespace {

void radix2(std::vector<Complex>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        // Twiddles computed directly rather than by recurrence to avoid
        // accumulated rounding on long transforms.
        std::vector<Complex> twiddle(len / 2);
        for (std::size_t k = 0; k < len / 2; ++k) twiddle[k] = std::polar(1.0, angle * static_cast<double>(k));
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const Complex u = a[start + k];
                const Complex v = a[start + k + len / 2] * twiddle[k];
                a[start + k] = u + v;
                a[start + k + len / 2] = u - v;
            }
        }
    }
}

void direct(std::vector<Complex>& a, bool inverse) {
    const std::size_t n = a.size();
    const double sign = inverse ? 1.0 : -1.0;
    std::vector<Complex> roots(n);
    for (std::size_t k = 0; k < n; ++k) {
        roots[k] = std::polar(1.0, sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
    }
    std::vector<Complex> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        Complex acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += a[j] * roots[(k * j) % n];
        out[k] = acc;
    }
    a = std::move(out);
}

} // namespace

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

void dft(std::vector<Complex>& data, bool inverse) {
    const std::size_t n = data.size();
    if (n == 0) return;
    if (is_power_of_two(n)) {
        radix2(data, inverse);
    } else if (n <= kMaxDirectDft) {
        direct(data, inverse);
    } else {
        throw InvalidArgument("transform length " + std::to_string(n) + " is neither a power of two nor <= " +
                              std::to_string(kMaxDirectDft));
    }
    if (inverse) {
        for (auto& v : data) v /= static_cast<double>(n);
    }
}

void dft2d(std::vector<Complex>& plane, std::size_t height, std::size_t width, bool inverse) {
    std::vector<Complex> line(width);
    for (std::size_t y = 0; y < height; ++y) {
        std::copy_n(plane.begin() + static_cast<long>(y * width), width, line.begin());
        dft(line, inverse);
        std::copy(line.begin(), line.end(), plane.begin() + static_cast<long>(y * width));
    }
    line.resize(height);
    for (std::size_t x = 0; x < width; ++x) {
        for (std::size_t y = 0; y < height; ++y) line[y] = plane[y * width + x];
        dft(line, inverse);
        for (std::size_t y = 0; y < height; ++y) plane[y * width + x] = line[y];
    }
}

} // namespace tilediff
