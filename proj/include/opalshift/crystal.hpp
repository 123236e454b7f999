#ifndef OPALSHIFT_CRYSTAL_HPP
#define OPALSHIFT_CRYSTAL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <lapacke.h>

#include "opalshift/constants.hpp"
#include "opalshift/vec.hpp"

namespace opalshift {

/// Inverse opal: spheres of permittivity eps_sphere (air) on the fcc sites of
/// a backbone with permittivity eps_background. Lengths are measured in units
/// of the conventional cubic lattice constant a; wave vectors in units of
/// 2*pi/a. Primitive vectors a/2*(0,1,1), a/2*(1,0,1), a/2*(1,1,0); one sphere
/// per primitive cell of volume a^3/4.
struct CrystalStructure {
    double lattice_constant = 100e-9;  // meters
    double eps_sphere = 1.0;
    double eps_background = 12.96;     // n = 3.6
    double filling_fraction = 0.74;

    // close packing: spheres touch at R = a/(2 sqrt 2)
    static constexpr double close_packed_fraction() {
        return constants::pi / (3.0 * 1.41421356237309515);
    }

    /// sphere radius in units of a, from f = (16 pi/3) (R/a)^3
    double sphere_radius() const {
        return std::cbrt(3.0 * filling_fraction / (16.0 * constants::pi));
    }

    void validate() const {
        if (!(lattice_constant > 0))
            throw std::invalid_argument("crystal: lattice_constant must be positive");
        if (!(eps_sphere >= 1.0) || !(eps_background >= 1.0))
            throw std::invalid_argument("crystal: permittivities must be >= 1");
        if (!(filling_fraction > 0.0) || !(filling_fraction < 1.0))
            throw std::invalid_argument("crystal: filling_fraction must lie in (0,1)");
        if (filling_fraction > close_packed_fraction() + 1e-12)
            throw std::invalid_argument(
                "crystal: filling_fraction " + std::to_string(filling_fraction) +
                " exceeds fcc close packing 0.7405; overlapping spheres are not supported");
    }

    /// true if the reduced position r (units of a) lies inside any sphere
    bool inside_sphere(Vec3 r) const {
        const double R2 = sphere_radius() * sphere_radius();
        // fcc basis sites of the conventional cube
        static constexpr double sites[4][3] = {
            {0, 0, 0}, {0.5, 0.5, 0}, {0.5, 0, 0.5}, {0, 0.5, 0.5}};
        // nearest image over cubic translations
        for (const auto& s : sites) {
            double dx = r.x - s[0], dy = r.y - s[1], dz = r.z - s[2];
            dx -= std::round(dx);
            dy -= std::round(dy);
            dz -= std::round(dz);
            if (dx * dx + dy * dy + dz * dz < R2) return true;
        }
        return false;
    }
};

/// Reciprocal lattice vectors G with |G| <= gmax (units 2*pi/a), ordered by
/// |G| then lexicographically so matrix assembly is reproducible. The fcc
/// reciprocal basis is b1=(-1,1,1), b2=(1,-1,1), b3=(1,1,-1); every G has
/// integer Cartesian components, either all even or all odd.
struct ReciprocalBasis {
    Vec3 b1{-1, 1, 1}, b2{1, -1, 1}, b3{1, 1, -1};
    double gmax = 0.0;
    std::vector<Vec3> g_vectors;

    std::size_t size() const { return g_vectors.size(); }

    static ReciprocalBasis build(double gmax) {
        if (!(gmax >= 0)) throw std::invalid_argument("basis: gmax must be >= 0");
        ReciprocalBasis basis;
        basis.gmax = gmax;
        const double cut2 = gmax * gmax + 1e-9;
        const int m = static_cast<int>(std::ceil(gmax)) + 2;
        struct Entry {
            std::int64_t n2;
            int x, y, z;
        };
        std::vector<Entry> entries;
        for (int h = -m; h <= m; ++h)
            for (int k = -m; k <= m; ++k)
                for (int l = -m; l <= m; ++l) {
                    const int x = -h + k + l, y = h - k + l, z = h + k - l;
                    const std::int64_t n2 =
                        std::int64_t(x) * x + std::int64_t(y) * y + std::int64_t(z) * z;
                    if (static_cast<double>(n2) <= cut2) entries.push_back({n2, x, y, z});
                }
        std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
            if (a.n2 != b.n2) return a.n2 < b.n2;
            if (a.x != b.x) return a.x < b.x;
            if (a.y != b.y) return a.y < b.y;
            return a.z < b.z;
        });
        basis.g_vectors.reserve(entries.size());
        for (const auto& e : entries)
            basis.g_vectors.push_back({double(e.x), double(e.y), double(e.z)});
        return basis;
    }
};

/// Fourier coefficient of eps(r) at reciprocal vector G. Real for this
/// centrosymmetric structure: the average for G=0, otherwise the single-sphere
/// form factor 3f [sin(GR) - GR cos(GR)] / (GR)^3 times the contrast.
inline double epsilon_fourier(const CrystalStructure& s, Vec3 G) {
    const double g = norm(G);
    if (g < 1e-12)
        return s.eps_background + s.filling_fraction * (s.eps_sphere - s.eps_background);
    const double x = 2.0 * constants::pi * g * s.sphere_radius();
    const double ff = 3.0 * s.filling_fraction * (std::sin(x) - x * std::cos(x)) / (x * x * x);
    return (s.eps_sphere - s.eps_background) * ff;
}

/// Dense matrix storage, column-major to match LAPACK.
struct SymMatrix {
    int n = 0;
    std::vector<double> a;  // n*n column-major

    explicit SymMatrix(int n_ = 0) : n(n_), a(std::size_t(n_) * n_, 0.0) {}
    double& at(int i, int j) { return a[std::size_t(j) * n + i]; }
    double at(int i, int j) const { return a[std::size_t(j) * n + i]; }
};

/// eps(G - G') over the truncated basis
inline SymMatrix epsilon_matrix(const CrystalStructure& s, const ReciprocalBasis& basis) {
    const int n = static_cast<int>(basis.size());
    SymMatrix E(n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            E.at(i, j) = epsilon_fourier(s, basis.g_vectors[i] - basis.g_vectors[j]);
    return E;
}

/// Fourier matrix of 1/eps(r) by Ho-Chan-Soukoulis inversion: invert the
/// truncated eps(G-G') rather than transforming 1/eps directly, which
/// converges much faster for high-contrast structures. eps(G-G') is symmetric
/// positive definite for any eps(r) >= 1, so Cholesky is used; failure
/// signals a non-physical permittivity input.
inline SymMatrix inverse_epsilon_matrix(const CrystalStructure& s,
                                        const ReciprocalBasis& basis) {
    if (basis.size() == 0) throw std::invalid_argument("inverse_epsilon_matrix: empty basis");
    SymMatrix eta = epsilon_matrix(s, basis);
    const int n = eta.n;
    int info = LAPACKE_dpotrf(LAPACK_COL_MAJOR, 'L', n, eta.a.data(), n);
    if (info != 0)
        throw std::runtime_error(
            "inverse_epsilon_matrix: eps(G-G') not positive definite (info=" +
            std::to_string(info) + "); permittivity input is non-physical");
    info = LAPACKE_dpotri(LAPACK_COL_MAJOR, 'L', n, eta.a.data(), n);
    if (info != 0)
        throw std::runtime_error("inverse_epsilon_matrix: inversion failed (info=" +
                                 std::to_string(info) + ")");
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < j; ++i) eta.at(i, j) = eta.at(j, i);
    return eta;
}

}  // namespace opalshift

#endif
