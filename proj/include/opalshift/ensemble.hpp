#ifndef OPALSHIFT_ENSEMBLE_HPP
#define OPALSHIFT_ENSEMBLE_HPP

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "opalshift/crystal.hpp"
#include "opalshift/vec.hpp"

namespace opalshift {

/// Atom placement for the position-dependent shift study. Sampling is
/// mt19937_64 (Mersenne Twister, fixed by the C++ standard, so sequences are
/// identical on every platform); doubles are drawn as (x >> 11) * 2^-53 to
/// avoid distribution-object portability differences.
struct EnsembleSpec {
    int n_atoms = 200;
    enum class Region { air_pores, full_cell } region = Region::air_pores;
    std::uint64_t rng_seed = 12345;
    std::string level = "2p";
    double lattice_constant = 100e-9;  // meters
};

struct SampleStats {
    std::size_t proposals = 0;
    std::size_t accepted = 0;
    double acceptance_rate() const {
        return proposals == 0 ? 0.0 : double(accepted) / double(proposals);
    }
};

inline double uniform_unit(std::mt19937_64& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

/// n_atoms positions uniform over the selected region of one conventional
/// cubic cell, reproducible bit-exactly from the seed. air_pores rejects
/// proposals outside the spheres (the voids an infiltrated atom can occupy).
inline std::vector<Vec3> sample_positions(const EnsembleSpec& spec,
                                          const CrystalStructure& structure,
                                          SampleStats* stats = nullptr) {
    if (spec.n_atoms < 1) throw std::invalid_argument("ensemble: n_atoms must be >= 1");
    std::mt19937_64 rng(spec.rng_seed);
    std::vector<Vec3> out;
    out.reserve(spec.n_atoms);
    SampleStats local;
    const std::size_t max_proposals =
        std::size_t(spec.n_atoms) * 10000 + 1000;  // rejection guard
    while (out.size() < std::size_t(spec.n_atoms)) {
        if (local.proposals > max_proposals)
            throw std::runtime_error(
                "ensemble: rejection sampling failed to converge; region is degenerate");
        Vec3 r{uniform_unit(rng), uniform_unit(rng), uniform_unit(rng)};
        ++local.proposals;
        if (spec.region == EnsembleSpec::Region::air_pores &&
            !structure.inside_sphere(r))
            continue;
        ++local.accepted;
        out.push_back(r);
    }
    if (stats) *stats = local;
    return out;
}

struct MiniBand {
    std::vector<double> shifts;        // rad/s, per atom (failures excluded)
    std::vector<double> shifts_reduced;
    std::vector<double> bin_edges;     // histogram over shifts (rad/s)
    std::vector<int> counts;
    std::size_t n_failed = 0;
    double width = 0.0;                // max - min, rad/s
    double quantiles[5] = {0, 0, 0, 0, 0};  // 0, 25, 50, 75, 100 %

    static MiniBand from_shifts(std::vector<double> shifts_rad_s,
                                std::vector<double> shifts_red, std::size_t failed,
                                int hist_bins) {
        MiniBand mb;
        mb.shifts = std::move(shifts_rad_s);
        mb.shifts_reduced = std::move(shifts_red);
        mb.n_failed = failed;
        if (mb.shifts.empty()) return mb;
        std::vector<double> sorted = mb.shifts;
        std::sort(sorted.begin(), sorted.end());
        const double lo = sorted.front(), hi = sorted.back();
        mb.width = hi - lo;
        const auto quant = [&](double q) {
            const double t = q * double(sorted.size() - 1);
            const std::size_t i = static_cast<std::size_t>(t);
            const double f = t - double(i);
            return i + 1 < sorted.size() ? sorted[i] * (1 - f) + sorted[i + 1] * f
                                         : sorted[i];
        };
        mb.quantiles[0] = lo;
        mb.quantiles[1] = quant(0.25);
        mb.quantiles[2] = quant(0.50);
        mb.quantiles[3] = quant(0.75);
        mb.quantiles[4] = hi;
        if (hist_bins < 1) hist_bins = 1;
        const double span = (mb.width > 0.0) ? mb.width : 1.0;
        mb.bin_edges.resize(hist_bins + 1);
        for (int b = 0; b <= hist_bins; ++b)
            mb.bin_edges[b] = lo + span * double(b) / hist_bins;
        mb.counts.assign(hist_bins, 0);
        for (double s : mb.shifts) {
            int b = static_cast<int>((s - lo) / span * hist_bins);
            b = std::clamp(b, 0, hist_bins - 1);
            ++mb.counts[b];
        }
        return mb;
    }
};

}  // namespace opalshift

#endif
