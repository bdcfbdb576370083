#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tilediff/error.hpp"

namespace tilediff {

struct Shape {
    std::size_t channels = 0;
    std::size_t height = 0;
    std::size_t width = 0;

    std::size_t plane() const noexcept { return height * width; }
    std::size_t size() const noexcept { return channels * height * width; }

    friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& shape);

/**
 * Dense channels x height x width array, row-major within a channel plane and
 * channel-major overall. Used for latents and pixel images alike.
 *
 * Grid (float) is the interchange type. GridF64 carries trajectory state
 * inside the sampler where repeated scale/unscale must not drift.
 */
template <typename T>
class BasicGrid {
public:
    using value_type = T;

    BasicGrid() = default;

    explicit BasicGrid(Shape shape, T fill = T(0)) : shape_(check(shape)), data_(shape.size(), fill) {}

    BasicGrid(std::size_t channels, std::size_t height, std::size_t width, T fill = T(0))
        : BasicGrid(Shape{channels, height, width}, fill) {}

    BasicGrid(Shape shape, std::vector<T> data) : shape_(check(shape)), data_(std::move(data)) {
        if (data_.size() != shape_.size()) {
            throw InvalidArgument("grid data length " + std::to_string(data_.size()) +
                                  " does not match shape " + to_string(shape_));
        }
    }

    template <typename U>
    static BasicGrid converted_from(const BasicGrid<U>& other) {
        std::vector<T> data(other.size());
        auto src = other.values();
        for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<T>(src[i]);
        return BasicGrid(other.shape(), std::move(data));
    }

    const Shape& shape() const noexcept { return shape_; }
    std::size_t channels() const noexcept { return shape_.channels; }
    std::size_t height() const noexcept { return shape_.height; }
    std::size_t width() const noexcept { return shape_.width; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    std::size_t index(std::size_t c, std::size_t y, std::size_t x) const noexcept {
        return (c * shape_.height + y) * shape_.width + x;
    }

    T& at(std::size_t c, std::size_t y, std::size_t x) noexcept { return data_[index(c, y, x)]; }
    T at(std::size_t c, std::size_t y, std::size_t x) const noexcept { return data_[index(c, y, x)]; }

    T& operator[](std::size_t i) noexcept { return data_[i]; }
    T operator[](std::size_t i) const noexcept { return data_[i]; }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }

    std::span<T> channel(std::size_t c) noexcept {
        return std::span<T>(data_).subspan(c * shape_.plane(), shape_.plane());
    }
    std::span<const T> channel(std::size_t c) const noexcept {
        return std::span<const T>(data_).subspan(c * shape_.plane(), shape_.plane());
    }

    friend bool operator==(const BasicGrid&, const BasicGrid&) = default;

private:
    static Shape check(Shape shape) {
        if (shape.channels == 0 || shape.height == 0 || shape.width == 0) {
            throw InvalidArgument("grid dimensions must be positive, got " + to_string(shape));
        }
        return shape;
    }

    Shape shape_{};
    std::vector<T> data_;
};

using Grid = BasicGrid<float>;
using GridF64 = BasicGrid<double>;

// Throws NumericError naming `what` if any element is NaN or infinite.
void require_finite(const Grid& g, const std::string& what);
void require_finite(const GridF64& g, const std::string& what);

void require_same_shape(const Shape& a, const Shape& b, const std::string& what);

double max_abs_diff(const Grid& a, const Grid& b);

struct GridStats {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t non_finite = 0;
};

GridStats compute_stats(const Grid& g);

} // namespace tilediff
