#ifndef OPALSHIFT_EIGEN_LAPACK_HPP
#define OPALSHIFT_EIGEN_LAPACK_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include <lapacke.h>

#include "opalshift/crystal.hpp"

namespace opalshift {

struct EigenResult {
    int found = 0;
    std::vector<double> values;   // ascending
    std::vector<double> vectors;  // n x found, column-major; empty if not requested
    int n = 0;
};

namespace detail {

inline EigenResult syevr(SymMatrix A, char jobz, char range, double vl, double vu,
                         int il, int iu, const std::string& context) {
    const int n = A.n;
    EigenResult r;
    r.n = n;
    r.values.assign(n, 0.0);
    const int max_m = (range == 'I') ? (iu - il + 1) : n;
    if (jobz == 'V') r.vectors.assign(std::size_t(n) * max_m, 0.0);
    std::vector<lapack_int> isuppz(2 * std::size_t(std::max(1, max_m)));
    lapack_int m = 0;
    int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, jobz, range, 'L', n, A.a.data(), n,
                              vl, vu, il, iu, 0.0, &m, r.values.data(),
                              jobz == 'V' ? r.vectors.data() : nullptr, n, isuppz.data());
    if (info != 0)
        throw std::runtime_error("dsyevr failed (info=" + std::to_string(info) +
                                 ") " + context);
    r.found = static_cast<int>(m);
    r.values.resize(r.found);
    if (jobz == 'V') r.vectors.resize(std::size_t(n) * r.found);
    return r;
}

}  // namespace detail

/// lowest m eigenpairs of a symmetric matrix
inline EigenResult eigh_lowest(SymMatrix A, int m, bool vectors = true,
                               const std::string& context = "") {
    if (m < 1 || m > A.n)
        throw std::invalid_argument("eigh_lowest: m out of range");
    return detail::syevr(std::move(A), vectors ? 'V' : 'N', 'I', 0, 0, 1, m, context);
}

/// all eigenpairs with eigenvalue in (vl, vu]
inline EigenResult eigh_value_range(SymMatrix A, double vl, double vu,
                                    bool vectors = true, const std::string& context = "") {
    if (!(vl < vu)) throw std::invalid_argument("eigh_value_range: need vl < vu");
    return detail::syevr(std::move(A), vectors ? 'V' : 'N', 'V', vl, vu, 0, 0, context);
}

}  // namespace opalshift

#endif
