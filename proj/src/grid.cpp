#include "tilediff/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tilediff {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
    case ErrorKind::protocol: return "protocol";
    case ErrorKind::numeric: return "numeric";
    }
    return "unknown";
}

std::string_view to_string(ProtocolFailure failure) {
    switch (failure) {
    case ProtocolFailure::connection: return "connection";
    case ProtocolFailure::timeout: return "timeout";
    case ProtocolFailure::malformed_frame: return "malformed frame";
    case ProtocolFailure::remote_failure: return "remote failure";
    case ProtocolFailure::version_mismatch: return "version mismatch";
    }
    return "unknown";
}

std::string to_string(const Shape& shape) {
    return std::to_string(shape.channels) + "x" + std::to_string(shape.height) + "x" +
           std::to_string(shape.width);
}

namespace {

template <typename T>
void require_finite_impl(const BasicGrid<T>& g, const std::string& what) {
    const auto values = g.values();
    const auto it = std::find_if(values.begin(), values.end(), [](T v) { return !std::isfinite(v); });
    if (it != values.end()) {
        throw NumericError(what + ": non-finite value at flat index " +
                           std::to_string(static_cast<std::size_t>(it - values.begin())));
    }
}

} // namespace

void require_finite(const Grid& g, const std::string& what) { require_finite_impl(g, what); }
void require_finite(const GridF64& g, const std::string& what) { require_finite_impl(g, what); }

void require_same_shape(const Shape& a, const Shape& b, const std::string& what) {
    if (a != b) {
        throw InvalidArgument(what + ": shape mismatch " + to_string(a) + " vs " + to_string(b));
    }
}

double max_abs_diff(const Grid& a, const Grid& b) {
    require_same_shape(a.shape(), b.shape(), "max_abs_diff");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i])));
    }
    return worst;
}

GridStats compute_stats(const Grid& g) {
    GridStats stats;
    stats.min = std::numeric_limits<double>::infinity();
    stats.max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t n = 0;
    for (float v : g.values()) {
        if (!std::isfinite(v)) {
            ++stats.non_finite;
            continue;
        }
        stats.min = std::min(stats.min, static_cast<double>(v));
        stats.max = std::max(stats.max, static_cast<double>(v));
        sum += v;
        sum_sq += static_cast<double>(v) * v;
        ++n;
    }
    if (n > 0) {
        stats.mean = sum / static_cast<double>(n);
        stats.stddev = std::sqrt(std::max(0.0, sum_sq / static_cast<double>(n) - stats.mean * stats.mean));
    } else {
        stats.min = stats.max = 0.0;
    }
    return stats;
}

} // namespace tilediff
