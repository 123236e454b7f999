#ifndef OPALSHIFT_LSRF_HPP
#define OPALSHIFT_LSRF_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "opalshift/bands.hpp"
#include "opalshift/bz_mesh.hpp"
#include "opalshift/parallel.hpp"

namespace opalshift {

/// Delta-function representation for the BZ histogram. Each mode is deposited
/// as a Gaussian of width sigma via bin-edge CDF differences (mass-exact on
/// the grid).
///
/// adaptive: sigma_nk = velocity_factor * |v_nk| * mesh spacing, floored at
/// floor_bins bin widths. Dispersive modes get a width matching the spread of
/// the band across one mesh cell, which removes the shell-clustering noise of
/// a uniform mesh; band-edge modes (|v| -> 0) stay sharp so complete gaps keep
/// a clean zero.
/// fixed: sigma = fixed_bins bin widths everywhere.
struct BroadeningConfig {
    enum class Mode { adaptive, fixed };
    Mode mode = Mode::adaptive;
    double velocity_factor = 0.7;
    double floor_bins = 1.5;
    double fixed_bins = 1.5;

    double sigma(double bin_width, double mesh_spacing, double velocity) const {
        if (mode == Mode::fixed) return fixed_bins * bin_width;
        return std::max(velocity_factor * velocity * mesh_spacing,
                        floor_bins * bin_width);
    }

    /// largest sigma the config can produce (|v| <= 1)
    double sigma_cap(double bin_width, double mesh_spacing) const {
        if (mode == Mode::fixed) return fixed_bins * bin_width;
        return std::max(velocity_factor * mesh_spacing, floor_bins * bin_width);
    }
};

/// g(r,u) tabulated on a uniform grid of bin centers over (0, u_max].
/// Normalized so vacuum gives g(u) = u; g = 0 for u <= 0 by convention.
struct SpectralFunction {
    std::vector<Vec3> positions;        // reduced coordinates
    std::vector<double> freq_grid;      // bin centers, ascending
    std::vector<std::vector<double>> values;  // [position][bin]
    double bin_width = 0.0;

    double u_max() const { return freq_grid.empty() ? 0.0 : freq_grid.back() + 0.5 * bin_width; }

    /// linear interpolation; 0 for u <= 0, clamped at the last bin center
    double value_at(std::size_t pos, double u) const {
        if (u <= 0.0) return 0.0;
        const auto& v = values[pos];
        const double u0 = freq_grid.front();
        if (u <= u0) return v.front() * (u / u0);  // g(0) = 0
        if (u >= freq_grid.back()) return v.back();
        const double t = (u - u0) / bin_width;
        const std::size_t i = static_cast<std::size_t>(t);
        const double frac = t - double(i);
        return v[i] * (1.0 - frac) + v[i + 1] * frac;
    }
};

/// per-band extrema over the mesh, for gap detection
struct BandExtrema {
    std::vector<double> lo, hi;  // [band]
};

struct GapInterval {
    double u_lo = 0.0, u_hi = 0.0;
    int band_below = 0;  // 1-based index of the band under the gap
    double width() const { return u_hi - u_lo; }
};

/// largest interval with max_k u_n < min_k u_{n+1}
inline std::optional<GapInterval> find_gap(const BandExtrema& ext) {
    std::optional<GapInterval> best;
    const std::size_t nb = std::min(ext.lo.size(), ext.hi.size());
    for (std::size_t b = 0; b + 1 < nb; ++b) {
        if (ext.lo[b + 1] > ext.hi[b]) {
            GapInterval g{ext.hi[b], ext.lo[b + 1], static_cast<int>(b + 1)};
            if (!best || g.width() > best->width()) best = g;
        }
    }
    return best;
}

struct LsrfResult {
    SpectralFunction sf;
    BandExtrema extrema;
};

namespace detail {

/// deposit fractions of a unit-mass Gaussian at (u, sigma) into bins;
/// walls at the grid ends clip the mass (modes outside the grid window are
/// handled by the solver's value-range margin)
inline void gaussian_bin_masses(double u, double sigma, double bin_width,
                                std::size_t n_bins, std::size_t& first,
                                std::vector<double>& masses) {
    const double lo = u - 5.0 * sigma, hi = u + 5.0 * sigma;
    const auto bin_of = [&](double x) {
        return static_cast<long>(std::floor(x / bin_width));
    };
    long b0 = std::max(bin_of(lo), 0L);
    long b1 = std::min(bin_of(hi), static_cast<long>(n_bins) - 1L);
    first = static_cast<std::size_t>(std::max(b0, 0L));
    masses.clear();
    if (b1 < b0) return;
    const double inv = 1.0 / (sigma * 1.4142135623730951);
    double cdf_left = 0.5 * (1.0 + std::erf((double(b0) * bin_width - u) * inv));
    for (long b = b0; b <= b1; ++b) {
        const double edge_r = double(b + 1) * bin_width;
        const double cdf_right = 0.5 * (1.0 + std::erf((edge_r - u) * inv));
        masses.push_back(cdf_right - cdf_left);
        cdf_left = cdf_right;
    }
}

}  // namespace detail

/// Brillouin-zone sweep producing g(r,u) at every requested position, plus
/// per-band extrema for gap detection.
///
/// g(r,u) = (1/(8 pi u)) sum_n int_BZ d3k |u_nk(r)|^2 delta(u - u_nk), with
/// the 1/(8 pi u) prefactor applied at each mode's own frequency (the
/// delta-faithful evaluation; it makes the vacuum limit g = u exact for the
/// broadened estimator up to mesh noise). Per-cell mode normalization makes
/// the crystal volume drop out; vacuum calibration fixes the prefactor.
///
/// The k-loop runs in fixed-size chunks: each chunk is solved in parallel
/// into per-k slots and reduced in k order, so results are independent of
/// worker count and completion order.
inline LsrfResult compute_lsrf(const ReciprocalBasis& basis, const SymMatrix& eta,
                               const BZMesh& mesh, const std::vector<Vec3>& positions,
                               double u_max, int n_bins,
                               const BroadeningConfig& broadening, int workers,
                               int extrema_bands = 16) {
    if (positions.empty()) throw std::invalid_argument("compute_lsrf: no positions");
    if (n_bins < 2 || !(u_max > 0)) throw std::invalid_argument("compute_lsrf: bad grid");

    LsrfResult out;
    auto& sf = out.sf;
    sf.positions = positions;
    sf.bin_width = u_max / n_bins;
    sf.freq_grid.resize(n_bins);
    for (int i = 0; i < n_bins; ++i) sf.freq_grid[i] = (i + 0.5) * sf.bin_width;
    sf.values.assign(positions.size(), std::vector<double>(n_bins, 0.0));
    out.extrema.lo.assign(extrema_bands, 1e300);
    out.extrema.hi.assign(extrema_bands, -1e300);

    const double h_mesh = mesh.spacing();
    const double sigma_cap = broadening.sigma_cap(sf.bin_width, h_mesh);
    const double u_solve = u_max + 5.0 * sigma_cap;

    const PositionEvaluator eval(basis, eta, positions);
    const std::size_t nk = mesh.size();
    const std::size_t n_pos = positions.size();

    struct KContribution {
        std::vector<std::vector<double>> hist;  // [position][bin]
        std::vector<double> low_bands;          // for extrema (zero modes included)
    };

    // chunk sizing: enough slots for the workers, capped by a ~64 MB budget
    const std::size_t slot_bytes = n_pos * std::size_t(n_bins) * 8 + 1;
    const std::size_t budget_slots = std::max<std::size_t>(1, (64u << 20) / slot_bytes);
    const std::size_t chunk = std::min(
        nk, std::max<std::size_t>(std::size_t(std::max(workers, 1)),
                                  std::min<std::size_t>(64, budget_slots)));
    std::vector<KContribution> slots(chunk);
    std::vector<char> band_covered(std::size_t(extrema_bands), 1);

    for (std::size_t base = 0; base < nk; base += chunk) {
        const std::size_t count = std::min(chunk, nk - base);
        parallel_for_index(count, workers, [&](std::size_t idx) {
            const Vec3 k = mesh.kpoints[base + idx].cart;
            EigenModeSet ms = solve_k_below(basis, eta, k, u_solve, eval);
            KContribution& slot = slots[idx];
            slot.hist.assign(n_pos, std::vector<double>(n_bins, 0.0));
            // zero modes were dropped from ms; re-count them for band indexing
            {
                const PolarizationFrame f = PolarizationFrame::build(basis, k);
                int zero_count = 0;
                for (double m : f.mag)
                    if (m < 1e-12) zero_count += 2;  // at Gamma only
                slot.low_bands.assign(std::size_t(extrema_bands), 1e300);
                int b = 0;
                for (; b < zero_count && b < extrema_bands; ++b) slot.low_bands[b] = 0.0;
                for (std::size_t m = 0; m < ms.modes.size() && b < extrema_bands; ++m, ++b)
                    slot.low_bands[b] = ms.modes[m].u;
            }
            std::vector<double> masses;
            std::size_t first = 0;
            for (const Mode& mode : ms.modes) {
                const double sigma =
                    broadening.sigma(sf.bin_width, h_mesh, mode.velocity);
                detail::gaussian_bin_masses(mode.u, sigma, sf.bin_width, n_bins,
                                            first, masses);
                if (masses.empty()) continue;
                const double base_w =
                    mesh.weight / (8.0 * constants::pi * mode.u);
                for (std::size_t p = 0; p < n_pos; ++p) {
                    const double wgt = base_w * abs2(mode.envelope[p]);
                    double* dst = slot.hist[p].data() + first;
                    for (std::size_t b = 0; b < masses.size(); ++b)
                        dst[b] += wgt * masses[b];
                }
            }
        });
        // deterministic merge in k order
        for (std::size_t idx = 0; idx < count; ++idx) {
            const KContribution& slot = slots[idx];
            for (std::size_t p = 0; p < n_pos; ++p) {
                double* dst = sf.values[p].data();
                const double* src = slot.hist[p].data();
                for (int b = 0; b < n_bins; ++b) dst[b] += src[b];
            }
            for (int b = 0; b < extrema_bands; ++b) {
                if (slot.low_bands[b] > 1e299) {
                    band_covered[b] = 0;  // band above the solve window at this k
                    continue;
                }
                out.extrema.lo[b] = std::min(out.extrema.lo[b], slot.low_bands[b]);
                out.extrema.hi[b] = std::max(out.extrema.hi[b], slot.low_bands[b]);
            }
        }
    }

    const double inv_dw = 1.0 / sf.bin_width;
    for (auto& v : sf.values)
        for (double& x : v) x *= inv_dw;

    // keep only bands covered at every k
    for (int b = 0; b < extrema_bands; ++b)
        if (!band_covered[b]) {
            out.extrema.lo.resize(b);
            out.extrema.hi.resize(b);
            break;
        }
    return out;
}

/// eigenvalue-only scan of the lowest bands over a mesh (mesh-refinement
/// studies of gap edges)
inline BandExtrema band_extrema(const ReciprocalBasis& basis, const SymMatrix& eta,
                                const BZMesh& mesh, int n_bands, int workers) {
    BandExtrema ext;
    ext.lo.assign(n_bands, 1e300);
    ext.hi.assign(n_bands, -1e300);
    const std::size_t nk = mesh.size();
    std::vector<std::vector<double>> slots(nk);
    parallel_for_index(nk, workers, [&](std::size_t i) {
        slots[i] = bands_at(basis, eta, mesh.kpoints[i].cart, n_bands);
    });
    for (const auto& u : slots)
        for (int b = 0; b < n_bands && b < static_cast<int>(u.size()); ++b) {
            ext.lo[b] = std::min(ext.lo[b], u[b]);
            ext.hi[b] = std::max(ext.hi[b], u[b]);
        }
    return ext;
}

}  // namespace opalshift

#endif
