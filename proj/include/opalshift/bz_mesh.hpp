#ifndef OPALSHIFT_BZ_MESH_HPP
#define OPALSHIFT_BZ_MESH_HPP

#include <stdexcept>
#include <vector>

#include "opalshift/bands.hpp"
#include "opalshift/crystal.hpp"

namespace opalshift {

/// Uniform Gamma-centered mesh over the full first Brillouin zone, fractional
/// coordinates i/n of the reciprocal basis, reduced into the first BZ. The
/// point set is closed under k -> -k and under the cubic point group, which
/// the symmetry tests rely on. Weights are uniform, summing to the BZ volume
/// (4 in units of (2 pi/a)^3 for fcc).
struct BZMesh {
    int n1 = 16, n2 = 16, n3 = 16;
    std::vector<KPoint> kpoints;
    double weight = 0.0;  // per point

    static constexpr double bz_volume = 4.0;

    std::size_t size() const { return kpoints.size(); }

    /// characteristic mesh spacing (cell-volume cube root), used by the
    /// adaptive broadening
    double spacing() const {
        return std::cbrt(bz_volume / double(std::size_t(n1) * n2 * n3));
    }

    static BZMesh build(const ReciprocalBasis& basis, int n1, int n2, int n3) {
        if (n1 < 1 || n2 < 1 || n3 < 1)
            throw std::invalid_argument("bz_mesh: dimensions must be >= 1");
        BZMesh mesh;
        mesh.n1 = n1;
        mesh.n2 = n2;
        mesh.n3 = n3;
        mesh.kpoints.reserve(std::size_t(n1) * n2 * n3);
        for (int i = 0; i < n1; ++i)
            for (int j = 0; j < n2; ++j)
                for (int l = 0; l < n3; ++l) {
                    const Vec3 frac{double(i) / n1, double(j) / n2, double(l) / n3};
                    KPoint kp;
                    kp.frac = frac;
                    kp.cart = reduce_to_bz(basis, frac_to_cart(basis, frac));
                    mesh.kpoints.push_back(kp);
                }
        mesh.weight = bz_volume / double(mesh.kpoints.size());
        return mesh;
    }
};

}  // namespace opalshift

#endif
