#ifndef OPALSHIFT_BANDS_HPP
#define OPALSHIFT_BANDS_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "opalshift/crystal.hpp"
#include "opalshift/eigen_lapack.hpp"
#include "opalshift/vec.hpp"

namespace opalshift {

/// wave vector in units of 2*pi/a
struct KPoint {
    Vec3 frac;  // fractional coordinates of b1,b2,b3
    Vec3 cart;  // Cartesian, reduced into the first Brillouin zone
};

inline Vec3 frac_to_cart(const ReciprocalBasis& b, Vec3 f) {
    return f.x * b.b1 + f.y * b.b2 + f.z * b.b3;
}

/// Translate k by reciprocal vectors into the first BZ (minimum |k|, ties
/// broken lexicographically so the reduction is deterministic).
inline Vec3 reduce_to_bz(const ReciprocalBasis& b, Vec3 k) {
    Vec3 best = k;
    double best2 = norm2(k);
    for (int h = -2; h <= 2; ++h)
        for (int l = -2; l <= 2; ++l)
            for (int m = -2; m <= 2; ++m) {
                Vec3 cand = k + double(h) * b.b1 + double(l) * b.b2 + double(m) * b.b3;
                double c2 = norm2(cand);
                if (c2 < best2 - 1e-12 ||
                    (c2 < best2 + 1e-12 &&
                     (cand.x < best.x - 1e-12 ||
                      (std::abs(cand.x - best.x) <= 1e-12 &&
                       (cand.y < best.y - 1e-12 ||
                        (std::abs(cand.y - best.y) <= 1e-12 && cand.z < best.z - 1e-12)))))) {
                    best = cand;
                    best2 = c2;
                }
            }
    return best;
}

/// Two transverse unit vectors per k+G. Tie-break for |z x (k+G)| ~ 0: e1 = x.
struct PolarizationFrame {
    std::vector<Vec3> e1, e2;
    std::vector<double> mag;  // |k+G|

    static PolarizationFrame build(const ReciprocalBasis& basis, Vec3 k) {
        PolarizationFrame f;
        const std::size_t n = basis.size();
        f.e1.resize(n);
        f.e2.resize(n);
        f.mag.resize(n);
        const Vec3 zhat{0, 0, 1}, xhat{1, 0, 0};
        for (std::size_t i = 0; i < n; ++i) {
            const Vec3 kg = k + basis.g_vectors[i];
            f.mag[i] = norm(kg);
            Vec3 e1 = cross(zhat, kg);
            const double n1 = norm(e1);
            e1 = (n1 < 1e-12) ? xhat : (1.0 / n1) * e1;
            Vec3 e2 = cross(kg, e1);
            const double n2 = norm(e2);
            e2 = (n2 < 1e-12) ? cross(zhat, e1) : (1.0 / n2) * e2;
            f.e1[i] = e1;
            f.e2[i] = e2;
        }
        return f;
    }
};

/// H-field plane-wave operator, 2N x 2N, eigenvalues (omega a / 2 pi c)^2.
/// Row/column p = 2*i + lambda indexes (G_i, polarization lambda). Real
/// symmetric here: frames and eta are real for the centrosymmetric structure.
inline SymMatrix assemble_maxwell_operator(const SymMatrix& eta,
                                           const PolarizationFrame& f) {
    const int n = static_cast<int>(f.mag.size());
    if (eta.n != n) throw std::invalid_argument("assemble_maxwell_operator: size mismatch");
    SymMatrix M(2 * n);
    for (int j = 0; j < n; ++j) {
        const Vec3 e1j = f.e1[j], e2j = f.e2[j];
        for (int i = 0; i < n; ++i) {
            const double s = f.mag[i] * f.mag[j] * eta.at(i, j);
            M.at(2 * i, 2 * j) = s * dot(f.e2[i], e2j);
            M.at(2 * i, 2 * j + 1) = -s * dot(f.e2[i], e1j);
            M.at(2 * i + 1, 2 * j) = -s * dot(f.e1[i], e2j);
            M.at(2 * i + 1, 2 * j + 1) = s * dot(f.e1[i], e1j);
        }
    }
    return M;
}

/// Evaluates normalized E-field Bloch envelopes at fixed positions by direct
/// Fourier summation. Precomputes W = phases * eta once per (basis, eta,
/// positions): u_c(r_p) = sum_G W[p][G] * D_G[c] / u, where D = curl-H
/// coefficients and the 1/eps division is the eta multiply folded into W.
/// The mode normalization (1/V) int eps |u|^2 = 1 is exact in the truncated
/// basis because D^T eta D equals the eigenvalue.
class PositionEvaluator {
public:
    PositionEvaluator() = default;

    PositionEvaluator(const ReciprocalBasis& basis, const SymMatrix& eta,
                      const std::vector<Vec3>& positions)
        : n_(static_cast<int>(basis.size())), positions_(positions) {
        const int P = static_cast<int>(positions.size());
        w_.assign(std::size_t(P) * n_, {0.0, 0.0});
        std::vector<std::complex<double>> phase(n_);
        for (int p = 0; p < P; ++p) {
            for (int g = 0; g < n_; ++g) {
                const double arg =
                    2.0 * constants::pi * dot(basis.g_vectors[g], positions[p]);
                phase[g] = {std::cos(arg), std::sin(arg)};
            }
            for (int gp = 0; gp < n_; ++gp) {
                std::complex<double> acc{0.0, 0.0};
                for (int g = 0; g < n_; ++g) acc += phase[g] * eta.at(g, gp);
                w_[std::size_t(p) * n_ + gp] = acc;
            }
        }
    }

    int n_positions() const { return static_cast<int>(positions_.size()); }
    const std::vector<Vec3>& positions() const { return positions_; }

    /// envelope of one mode at all positions; d = curl coefficients (3 per G),
    /// w_eig = eigenvalue (= squared reduced frequency)
    void envelopes(const std::vector<double>& d, double w_eig,
                   std::vector<Cvec3>& out) const {
        const int P = n_positions();
        out.resize(P);
        const double inv_u = 1.0 / std::sqrt(w_eig);
        for (int p = 0; p < P; ++p) {
            Cvec3 acc{{{0, 0}, {0, 0}, {0, 0}}};
            const std::complex<double>* wrow = &w_[std::size_t(p) * n_];
            for (int g = 0; g < n_; ++g) {
                const std::complex<double> wpg = wrow[g];
                acc[0] += wpg * d[3 * g];
                acc[1] += wpg * d[3 * g + 1];
                acc[2] += wpg * d[3 * g + 2];
            }
            for (auto& c : acc) c *= inv_u;
            out[p] = acc;
        }
    }

private:
    int n_ = 0;
    std::vector<Vec3> positions_;
    std::vector<std::complex<double>> w_;  // P x N
};

struct Mode {
    double u = 0.0;                  // reduced frequency
    double velocity = 0.0;           // |group velocity|/c proxy, in [0,1]
    std::vector<Cvec3> envelope;     // per position
};

struct EigenModeSet {
    KPoint k;
    std::vector<Mode> modes;  // ascending u; zero-frequency modes dropped
};

namespace detail {

/// group-velocity magnitude proxy: |sum over plane-wave weight of the unit
/// vector (k+G)/|k+G||; ~1 for free-photon-like modes, ~0 for standing waves
inline double velocity_proxy(const double* h, const PolarizationFrame& f, Vec3 k,
                             const ReciprocalBasis& basis) {
    Vec3 v{0, 0, 0};
    const std::size_t n = basis.size();
    for (std::size_t g = 0; g < n; ++g) {
        const double wgt = h[2 * g] * h[2 * g] + h[2 * g + 1] * h[2 * g + 1];
        if (f.mag[g] < 1e-12) continue;
        v = v + (wgt / f.mag[g]) * (k + basis.g_vectors[g]);
    }
    return std::min(norm(v), 1.0);
}

inline void curl_coefficients(const double* h, const PolarizationFrame& f,
                              std::vector<double>& d) {
    const std::size_t n = f.mag.size();
    d.resize(3 * n);
    for (std::size_t g = 0; g < n; ++g) {
        const double c1 = f.mag[g] * h[2 * g];      // multiplies e2
        const double c2 = -f.mag[g] * h[2 * g + 1]; // multiplies e1
        d[3 * g] = c1 * f.e2[g].x + c2 * f.e1[g].x;
        d[3 * g + 1] = c1 * f.e2[g].y + c2 * f.e1[g].y;
        d[3 * g + 2] = c1 * f.e2[g].z + c2 * f.e1[g].z;
    }
}

}  // namespace detail

inline constexpr double zero_mode_floor = 1e-10;

/// Solve one k-point: lowest n_bands eigenpairs, E-field envelopes at the
/// evaluator's positions. Zero-frequency modes (at Gamma) carry no field and
/// are skipped.
inline EigenModeSet solve_k(const ReciprocalBasis& basis, const SymMatrix& eta,
                            Vec3 k_cart, int n_bands, const PositionEvaluator& eval) {
    const int two_n = 2 * static_cast<int>(basis.size());
    if (n_bands < 1 || n_bands > two_n)
        throw std::invalid_argument("solve_k: n_bands must lie in [1, 2N]");
    const PolarizationFrame f = PolarizationFrame::build(basis, k_cart);
    EigenResult r = eigh_lowest(assemble_maxwell_operator(eta, f), n_bands, true,
                                "at k=(" + std::to_string(k_cart.x) + "," +
                                    std::to_string(k_cart.y) + "," +
                                    std::to_string(k_cart.z) + ") size " +
                                    std::to_string(two_n));
    EigenModeSet out;
    out.k = KPoint{{}, k_cart};
    out.modes.reserve(r.found);
    std::vector<double> d;
    for (int m = 0; m < r.found; ++m) {
        const double w = r.values[m];
        if (w <= zero_mode_floor) continue;
        const double* h = &r.vectors[std::size_t(m) * two_n];
        Mode mode;
        mode.u = std::sqrt(w);
        mode.velocity = detail::velocity_proxy(h, f, k_cart, basis);
        detail::curl_coefficients(h, f, d);
        eval.envelopes(d, w, mode.envelope);
        out.modes.push_back(std::move(mode));
    }
    return out;
}

/// Same as solve_k but keeps every mode with u <= u_max (value-range solve);
/// used by the LSRF sweep where the band count needed varies with k.
inline EigenModeSet solve_k_below(const ReciprocalBasis& basis, const SymMatrix& eta,
                                  Vec3 k_cart, double u_max,
                                  const PositionEvaluator& eval) {
    const PolarizationFrame f = PolarizationFrame::build(basis, k_cart);
    EigenResult r = eigh_value_range(assemble_maxwell_operator(eta, f), -1.0,
                                     u_max * u_max, true, "value-range solve");
    EigenModeSet out;
    out.k = KPoint{{}, k_cart};
    const int two_n = 2 * static_cast<int>(basis.size());
    if (r.found == two_n)
        throw std::runtime_error(
            "solve_k_below: every eigenvalue of the truncated operator lies below "
            "u_max; enlarge the plane-wave cutoff or lower the frequency grid");
    std::vector<double> d;
    for (int m = 0; m < r.found; ++m) {
        const double w = r.values[m];
        if (w <= zero_mode_floor) continue;
        const double* h = &r.vectors[std::size_t(m) * two_n];
        Mode mode;
        mode.u = std::sqrt(w);
        mode.velocity = detail::velocity_proxy(h, f, k_cart, basis);
        detail::curl_coefficients(h, f, d);
        eval.envelopes(d, w, mode.envelope);
        out.modes.push_back(std::move(mode));
    }
    return out;
}

/// eigenvalues only, lowest n_bands, zero modes included (band bookkeeping)
inline std::vector<double> bands_at(const ReciprocalBasis& basis, const SymMatrix& eta,
                                    Vec3 k_cart, int n_bands) {
    const PolarizationFrame f = PolarizationFrame::build(basis, k_cart);
    EigenResult r = eigh_lowest(assemble_maxwell_operator(eta, f), n_bands, false,
                                "band scan");
    std::vector<double> u(r.found);
    for (int m = 0; m < r.found; ++m) u[m] = std::sqrt(std::max(r.values[m], 0.0));
    return u;
}

}  // namespace opalshift

#endif
