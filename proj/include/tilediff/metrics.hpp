#pragma once

#include <limits>
#include <vector>

#include "tilediff/grid.hpp"
#include "tilediff/tiler.hpp"

namespace tilediff {

// Radial frequency is measured so that the Nyquist frequency of either axis
// sits at 1; diagonal corners reach sqrt(2).
struct Band {
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity(); // exclusive

    bool contains(double r) const noexcept { return r >= lo && r < hi; }
};

inline constexpr Band kLowBand{0.0, 1.0 / 3.0};
inline constexpr Band kMidBand{1.0 / 3.0, 2.0 / 3.0};
inline constexpr Band kHighBand{2.0 / 3.0, std::numeric_limits<double>::infinity()};
// Coarse layout only; used for structure comparisons against an upscaled source.
inline constexpr Band kStructureBand{0.0, 0.125};

struct SpectrumBands {
    std::vector<double> edges{1.0 / 3.0, 2.0 / 3.0}; // interior edges, ascending
    std::vector<double> energies;                    // edges.size() + 1 entries, low to high
    double total = 0.0;                              // non-DC power, equals sum(energies)
    double dc = 0.0;

    double low() const { return energies.front(); }
    double high() const { return energies.back(); }
};

// Spectral power per radial band, summed over channels and normalized so that
// the bands plus DC add up to sum(x^2). Every transform is checked against
// Parseval at 1e-4 relative (NumericError on violation). Each spatial size
// must be a power of two or at most kMaxDirectDft.
SpectrumBands radial_band_energy(const Grid& g, std::vector<double> edges = {1.0 / 3.0, 2.0 / 3.0});

// Whether radial_band_energy() and band_filter() accept this size.
bool spectral_size_supported(const Shape& shape) noexcept;

// Normalized radial frequency of bin (ky, kx) in an h x w transform.
double radial_frequency(std::size_t ky, std::size_t kx, std::size_t h, std::size_t w) noexcept;

// Keeps only the spectral bins inside `band` (ideal mask), per channel.
GridF64 band_filter(const Grid& g, const Band& band);

// Pearson correlation of the band-filtered grids, clamped to [-1, 1]. Two
// zero-variance inputs correlate at 1 when equal and 0 otherwise.
double band_correlation(const Grid& a, const Grid& b, const Band& band);

// 10 log10(peak^2 / MSE); +infinity for identical grids.
double psnr(const Grid& a, const Grid& b, double peak = 1.0);

/// Ratio of second-difference energy on patch boundary lines to the energy
/// elsewhere:
///   s(c) = d2x(c)^2 + d2y(c)^2 (only terms with both neighbours in range)
///   ratio = sqrt((mean_B s + eps) / (mean_I s + eps))
/// B holds the two cells straddling every patch window edge inside the canvas
/// and every nearest-centre cut between neighbouring patches; I is the rest.
/// eps = (1e-6 * value range)^2 keeps flat grids at 1. A layout with a single
/// patch has no boundary and scores 1.
double seam_energy(const Grid& g, const TileLayout& layout);

// Cells counted as boundary by seam_energy(), 1 x H x W with values 0 or 1.
Grid seam_boundary_mask(const TileLayout& layout);

} // namespace tilediff
