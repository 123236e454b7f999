#ifndef OPALSHIFT_QUADRATURE_HPP
#define OPALSHIFT_QUADRATURE_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "opalshift/constants.hpp"
#include "opalshift/lsrf.hpp"

namespace opalshift {

struct QuadratureConfig {
    double u_op = 3.5;                 // optical cutoff, reduced units
    double omega_rel = constants::omega_rel_default;  // rad/s
    double rel_tol = 1e-6;
    double abs_tol = 1e-12;

    double u_rel(double lattice_constant_m) const {
        return constants::reduced_frequency(omega_rel, lattice_constant_m);
    }

    void validate(double lattice_constant_m) const {
        if (!(u_op > 0)) throw std::invalid_argument("quadrature: u_op must be positive");
        if (!(u_op < u_rel(lattice_constant_m)))
            throw std::invalid_argument("quadrature: u_op must lie below u_rel");
        if (!(rel_tol > 0) || !(abs_tol > 0))
            throw std::invalid_argument("quadrature: tolerances must be positive");
    }
};

struct BetaValue {
    double detuning = 0.0;  // reduced units
    double value = 0.0;
    enum class Kind { principal, normal } kind = Kind::normal;
};

/// closed-form vacuum beta over (0, u_rel] with g = u'
inline double beta_vacuum(double detuning, double u_rel) {
    if (detuning == 0.0) throw std::invalid_argument("beta_vacuum: zero detuning");
    if (detuning < 0.0) return -std::log1p(u_rel / (-detuning));
    return std::log(std::abs(detuning / (detuning - u_rel)));
}

namespace detail {

/// Integration nodes over (0, u_op]: u=0 (with the g/u limit extrapolated),
/// the tabulated bin centers, and u_op itself.
struct PvTable {
    std::vector<double> x;    // nodes
    std::vector<double> psi;  // phi(x)/x at the nodes

    double psi_at(double u) const {
        // linear interpolation on the node grid (uniform interior spacing)
        if (u <= x.front()) return psi.front();
        if (u >= x.back()) return psi.back();
        std::size_t lo = 0, hi = x.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (x[mid] <= u ? lo : hi) = mid;
        }
        const double t = (u - x[lo]) / (x[hi] - x[lo]);
        return psi[lo] * (1.0 - t) + psi[hi] * t;
    }

    double dpsi_at(double u) const {
        std::size_t lo = 0, hi = x.size() - 1;
        if (u <= x.front()) return (psi[1] - psi[0]) / (x[1] - x[0]);
        if (u >= x.back()) {
            const std::size_t n = x.size();
            return (psi[n - 1] - psi[n - 2]) / (x[n - 1] - x[n - 2]);
        }
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (x[mid] <= u ? lo : hi) = mid;
        }
        return (psi[hi] - psi[lo]) / (x[hi] - x[lo]);
    }
};

/// phi = g (subtract_vacuum = false) or g - u' (true); psi = phi/u'
inline PvTable build_pv_table(const SpectralFunction& sf, std::size_t pos,
                              double u_op, bool subtract_vacuum) {
    if (sf.freq_grid.empty())
        throw std::invalid_argument("beta: empty spectral function");
    if (sf.freq_grid.back() + 0.5 * sf.bin_width < u_op - 1e-12)
        throw std::invalid_argument("beta: spectral function does not cover u_op");
    PvTable t;
    t.x.reserve(sf.freq_grid.size() + 2);
    t.psi.reserve(sf.freq_grid.size() + 2);
    const auto& g = sf.values[pos];
    t.x.push_back(0.0);
    t.psi.push_back(0.0);  // placeholder, fixed below
    for (std::size_t i = 0; i < sf.freq_grid.size(); ++i) {
        const double u = sf.freq_grid[i];
        if (u > u_op) break;
        t.x.push_back(u);
        t.psi.push_back(g[i] / u - (subtract_vacuum ? 1.0 : 0.0));
    }
    if (t.x.size() < 3) throw std::invalid_argument("beta: too few grid points below u_op");
    if (t.x.back() < u_op - 1e-12) {
        // end exactly at u_op (clamped extrapolation of g)
        const double gu = sf.value_at(pos, u_op);
        t.x.push_back(u_op);
        t.psi.push_back(gu / u_op - (subtract_vacuum ? 1.0 : 0.0));
    }
    t.psi[0] = t.psi[1];  // g/u limit at the origin
    return t;
}

/// P int_0^{u_op} phi(u')/((Delta - u')u') du' on the tabulated nodes.
/// For Delta inside (0, u_op) the simple pole is removed by subtracting
/// psi(Delta)/(Delta - u'), whose integral is the explicit log; the
/// subtracted integrand is bounded and trapezoid-integrable. A node falling
/// on Delta takes the -dpsi/du limit.
inline double pv_integral(const PvTable& t, double delta, double u_op) {
    const bool singular = delta > 0.0 && delta < u_op;
    const double s = singular ? t.psi_at(delta) : 0.0;
    const double slope_at_delta = singular ? -t.dpsi_at(delta) : 0.0;
    const std::size_t n = t.x.size();
    double acc = 0.0;
    double f_prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = delta - t.x[i];
        double f;
        if (singular && std::abs(d) < 1e-9 * std::max(1.0, std::abs(delta)))
            f = slope_at_delta;
        else
            f = (t.psi[i] - s) / d;
        if (i > 0) acc += 0.5 * (f + f_prev) * (t.x[i] - t.x[i - 1]);
        f_prev = f;
    }
    if (singular) acc += s * std::log(std::abs(delta / (delta - u_op)));
    return acc;
}

}  // namespace detail

/// Reusable evaluator for one (spectral function, position, kernel) triple;
/// root scans evaluate beta at ~1e5 detunings, so the node table is built once.
class PvKernel {
public:
    PvKernel(const SpectralFunction& sf, std::size_t pos, const QuadratureConfig& cfg,
             bool subtract_vacuum)
        : table_(detail::build_pv_table(sf, pos, cfg.u_op, subtract_vacuum)),
          u_op_(cfg.u_op) {}

    /// P int_0^{u_op} phi(u')/((Delta-u')u') du'
    double principal_value(double detuning) const {
        if (detuning == 0.0)
            throw std::invalid_argument("beta: zero detuning (integrand singular at origin)");
        return detail::pv_integral(table_, detuning, u_op_);
    }

    double u_op() const { return u_op_; }

private:
    detail::PvTable table_;
    double u_op_;
};

/// beta(r, Delta) of the radiative-correction kernel: principal-value integral
/// of g(r,u')/((Delta-u')u') over (0, u_rel], split into the tabulated PC
/// segment (0, u_op] and the analytic vacuum tail (u_op, u_rel] where the
/// medium is treated as free space (g = u').
inline double beta_with_tail(const PvKernel& kernel, double detuning, double u_rel) {
    double val = kernel.principal_value(detuning);
    // analytic tail; also the principal value when the pole lies inside it
    val += std::log(std::abs((detuning - kernel.u_op()) / (detuning - u_rel)));
    return val;
}

inline BetaValue beta(const SpectralFunction& sf, std::size_t pos, double detuning,
                      const QuadratureConfig& cfg, double lattice_constant_m) {
    const PvKernel kernel(sf, pos, cfg, false);
    BetaValue b;
    b.detuning = detuning;
    b.value = beta_with_tail(kernel, detuning, cfg.u_rel(lattice_constant_m));
    b.kind = detuning > 0.0 ? BetaValue::Kind::principal : BetaValue::Kind::normal;
    return b;
}

/// The crystal-minus-vacuum correction: P int_0^{u_op} (g - u')/((Delta-u')u') du'.
/// Vanishes identically for the vacuum spectral function; no tail.
inline double beta_pc_correction(const SpectralFunction& sf, std::size_t pos,
                                 double detuning, const QuadratureConfig& cfg) {
    return PvKernel(sf, pos, cfg, true).principal_value(detuning);
}

}  // namespace opalshift

#endif
