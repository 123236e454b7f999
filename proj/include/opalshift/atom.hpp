#ifndef OPALSHIFT_ATOM_HPP
#define OPALSHIFT_ATOM_HPP

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "opalshift/constants.hpp"
#include "opalshift/errors.hpp"

namespace opalshift {

/// Decay/shift channel seen from a given level: either an explicit dipole
/// partner or the lumped high-frequency (virtual) channel at the weighted
/// average frequency omega_bar, whose strength is fixed by the momentum sum
/// rule so that the vacuum limit reproduces the standard nonrelativistic
/// level shift.
struct Channel {
    std::string partner;
    double omega_j = 0.0;   // rad/s, absolute (levels measured from the ground state)
    double alpha = 0.0;     // dimensionless relative linewidth
    bool virtual_lump = false;
};

struct AtomLevel {
    std::string label;
    double omega = 0.0;      // rad/s above the ground state
    double psi0_sq = 0.0;    // |psi(0)|^2, 1/m^3
    double omega_bar = 0.0;  // rad/s, weighted average of the excitation spectrum
};

struct VacuumShift {
    std::string level;
    double delta0 = 0.0;  // rad/s
};

class AtomModel {
public:
    std::vector<AtomLevel> levels;
    // alpha[(l_label, j_label)] for explicit dipole-allowed pairs, symmetric
    std::map<std::pair<std::string, std::string>, double> alpha;
    // |p_lj|^2 with the sum-over-final-sublevels convention; feeds the
    // momentum sum-rule diagnostics
    std::map<std::pair<std::string, std::string>, double> p_sq;

    const AtomLevel& level(const std::string& label) const {
        for (const auto& l : levels)
            if (l.label == label) return l;
        throw std::invalid_argument("atom: unknown level '" + label + "'");
    }

    double alpha_of(const std::string& l, const std::string& j) const {
        auto it = alpha.find({l, j});
        return it == alpha.end() ? 0.0 : it->second;
    }

    /// Channels entering Gamma and Delta for level l: the explicit lower
    /// (real-photon) partners plus the virtual lump. The lump strength comes
    /// from sum_j omega_jl |p_lj|^2 = hbar e^2 |psi_l(0)|^2 / (2 eps0) with
    /// the spectrum collapsed onto omega_bar, i.e.
    /// |p_eff|^2 = hbar e^2 |psi_l(0)|^2 / (2 eps0 (omega_bar - omega_l)).
    std::vector<Channel> channels(const std::string& label) const {
        const AtomLevel& l = level(label);
        std::vector<Channel> out;
        for (const auto& [key, a] : alpha) {
            if (key.first != label || a == 0.0) continue;
            const AtomLevel& j = level(key.second);
            if (j.omega < l.omega)
                out.push_back({j.label, j.omega, a, false});
        }
        if (l.psi0_sq > 0.0) {
            if (!(l.omega_bar > l.omega))
                throw std::invalid_argument("atom: omega_bar must exceed omega for level " +
                                            label);
            using namespace constants;
            const double p_eff_sq = hbar * elementary_charge * elementary_charge *
                                    l.psi0_sq / (2.0 * eps0 * (l.omega_bar - l.omega));
            const double a_eff = elementary_charge * elementary_charge * p_eff_sq /
                                 (3.0 * pi * electron_mass * electron_mass * eps0 *
                                  hbar * c_light * c_light * c_light);
            out.push_back({"(virtual)", l.omega_bar, a_eff, true});
        }
        return out;
    }
};

/// Delta_l^0 = e^4 |psi_l(0)|^2 / (12 pi^2 m^2 eps0^2 c^3) * ln(omega_rel/(omega_bar - omega_l));
/// zero for levels with vanishing wave function at the origin.
inline VacuumShift vacuum_lamb_shift(const AtomModel& model, const std::string& label,
                                     double omega_rel = constants::omega_rel_default) {
    const AtomLevel& l = model.level(label);
    VacuumShift out;
    out.level = label;
    if (l.psi0_sq == 0.0) return out;
    if (!(l.omega_bar > l.omega))
        throw std::invalid_argument("atom: missing or invalid omega_bar for level " + label);
    using namespace constants;
    const double e4 = std::pow(elementary_charge, 4);
    out.delta0 = e4 * l.psi0_sq /
                 (12.0 * pi * pi * electron_mass * electron_mass * eps0 * eps0 *
                  c_light * c_light * c_light) *
                 std::log(omega_rel / (l.omega_bar - l.omega));
    return out;
}

namespace hydrogen_detail {

struct DipolePair {
    int n1, l1, n2, l2;
    double radial;  // <n1 l1| r |n2 l2> in Bohr radii (closed-form bound-bound values)
};

/// Radial integrals for all dipole-allowed bound-bound pairs with n <= 4.
inline const std::vector<DipolePair>& dipole_pairs() {
    static const std::vector<DipolePair> pairs = {
        {1, 0, 2, 1, 128.0 * std::sqrt(6.0) / 243.0},
        {1, 0, 3, 1, 27.0 * std::sqrt(6.0) / 128.0},
        {1, 0, 4, 1, 6144.0 * std::sqrt(15.0) / 78125.0},
        {2, 0, 2, 1, -3.0 * std::sqrt(3.0)},
        {2, 0, 3, 1, 27648.0 * std::sqrt(3.0) / 15625.0},
        {2, 0, 4, 1, 512.0 * std::sqrt(30.0) / 2187.0},
        {2, 1, 3, 0, 10368.0 * std::sqrt(2.0) / 15625.0},
        {2, 1, 3, 2, 165888.0 * std::sqrt(5.0) / 78125.0},
        {2, 1, 4, 0, 1024.0 * std::sqrt(6.0) / 6561.0},
        {2, 1, 4, 2, 2048.0 * std::sqrt(30.0) / 6561.0},
        {3, 0, 3, 1, -9.0 * std::sqrt(2.0)},
        {3, 0, 4, 1, 14100480.0 * std::sqrt(5.0) / 5764801.0},
        {3, 1, 3, 2, -4.5 * std::sqrt(5.0)},
        {3, 1, 4, 0, 5750784.0 * std::sqrt(6.0) / 5764801.0},
        {3, 1, 4, 2, 7962624.0 * std::sqrt(30.0) / 5764801.0},
        {3, 2, 4, 1, 5308416.0 * std::sqrt(2.0) / 5764801.0},
        {3, 2, 4, 3, 63700992.0 * std::sqrt(42.0) / 40353607.0},
        {4, 0, 4, 1, -6.0 * std::sqrt(15.0)},
        {4, 1, 4, 2, -12.0 * std::sqrt(3.0)},
        {4, 2, 4, 3, -6.0 * std::sqrt(7.0)},
    };
    return pairs;
}

inline std::string state_label(int n, int l) {
    static const char* names = "spdf";
    return std::to_string(n) + names[l];
}

}  // namespace hydrogen_detail

/// Hydrogen model with shells 1..n_max (n_max <= 4; higher shells and the
/// continuum are excluded — the virtual part is carried by omega_bar).
///
/// Levels are measured from the 1s ground state, omega_n = (Ry/hbar)(1 - 1/n^2).
/// |psi_ns(0)|^2 = 1/(pi n^3 a0^3), zero for l > 0.
///
/// alpha_lj = e^2 |p_lj|^2 / (3 pi m^2 eps0 hbar c^3) with
/// |p_lj|^2 = m^2 (w_l - w_j)^2 |r_lj|^2. The alpha normalization takes
/// |r_lj|^2 = 3 R_lj^2 (full multiplet strength, random-orientation
/// convention), which reproduces the reference relative linewidth
/// alpha(2p->1s) ~ 4e-7. The sum-rule table p_sq instead uses the
/// per-initial-state convention |r|^2 = (l_max/(2 l_l + 1)) R^2 required by
/// the momentum sum rule.
///
/// bethe_ry_above_ground: hbar*omega_bar in Rydbergs measured from the ground
/// state; 19.8 Ry is the standard weighted-average excitation energy input.
inline AtomModel hydrogen_model(int n_max, double bethe_ry_above_ground = 19.8) {
    if (n_max < 2) throw std::invalid_argument("hydrogen_model: n_max must be >= 2");
    if (n_max > 4) throw std::invalid_argument("hydrogen_model: radial data covers n <= 4");
    using namespace constants;
    const double ry_w = rydberg_energy / hbar;
    AtomModel m;
    for (int n = 1; n <= n_max; ++n)
        for (int l = 0; l < n; ++l) {
            AtomLevel lev;
            lev.label = hydrogen_detail::state_label(n, l);
            lev.omega = ry_w * (1.0 - 1.0 / (double(n) * n));
            lev.psi0_sq = (l == 0)
                              ? 1.0 / (pi * double(n) * n * n *
                                       bohr_radius * bohr_radius * bohr_radius)
                              : 0.0;
            lev.omega_bar = bethe_ry_above_ground * ry_w;  // above the ground state
            m.levels.push_back(lev);
        }
    const double alpha_denom =
        pi * eps0 * hbar * c_light * c_light * c_light;  // with |r|^2 = 3 R^2 folded in
    for (const auto& p : hydrogen_detail::dipole_pairs()) {
        if (p.n1 > n_max || p.n2 > n_max) continue;
        const std::string a = hydrogen_detail::state_label(p.n1, p.l1);
        const std::string b = hydrogen_detail::state_label(p.n2, p.l2);
        const double w_a = m.level(a).omega, w_b = m.level(b).omega;
        const double dw = w_a - w_b;
        const double r_m = p.radial * bohr_radius;
        const double alpha =
            elementary_charge * elementary_charge * dw * dw * r_m * r_m / alpha_denom;
        m.alpha[{a, b}] = alpha;
        m.alpha[{b, a}] = alpha;
        // sum-rule convention: average over initial sublevels, sum over final
        const int lmax = std::max(p.l1, p.l2);
        const double me2 = electron_mass * electron_mass;
        m.p_sq[{a, b}] = me2 * dw * dw * r_m * r_m * double(lmax) / (2.0 * p.l1 + 1.0);
        m.p_sq[{b, a}] = me2 * dw * dw * r_m * r_m * double(lmax) / (2.0 * p.l2 + 1.0);
    }
    return m;
}

/// Generic atoms from two CSV tables:
///   levels: level_label,omega_j_rad_s,psi0_sq_m3,omega_bar_rad_s
///   alpha:  level_from,level_to,alpha
/// A header row is expected and skipped. The sum-rule table p_sq is left
/// empty for table-driven atoms (it is a hydrogen diagnostic).
inline AtomModel load_atom_csv(const std::string& levels_path,
                               const std::string& alpha_path) {
    AtomModel m;
    std::ifstream lf(levels_path);
    if (!lf) throw IoError("atom: cannot open " + levels_path);
    std::string line;
    std::getline(lf, line);  // header
    while (std::getline(lf, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        AtomLevel lev;
        std::string field;
        std::getline(ss, lev.label, ',');
        std::getline(ss, field, ',');
        lev.omega = std::stod(field);
        std::getline(ss, field, ',');
        lev.psi0_sq = std::stod(field);
        std::getline(ss, field, ',');
        lev.omega_bar = std::stod(field);
        m.levels.push_back(lev);
    }
    if (m.levels.empty()) throw std::runtime_error("atom: no levels in " + levels_path);
    std::ifstream af(alpha_path);
    if (!af) throw IoError("atom: cannot open " + alpha_path);
    std::getline(af, line);  // header
    while (std::getline(af, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string from, to, field;
        std::getline(ss, from, ',');
        std::getline(ss, to, ',');
        std::getline(ss, field, ',');
        const double a = std::stod(field);
        if (a < 0.0) throw std::runtime_error("atom: negative alpha for " + from + "," + to);
        m.level(from);
        m.level(to);  // validates labels
        m.alpha[{from, to}] = a;
    }
    return m;
}

inline void save_atom_csv(const AtomModel& m, const std::string& levels_path,
                          const std::string& alpha_path) {
    std::ofstream lf(levels_path);
    if (!lf) throw IoError("atom: cannot write " + levels_path);
    lf << "level_label,omega_j_rad_s,psi0_sq_m3,omega_bar_rad_s\n";
    char buf[256];
    for (const auto& lev : m.levels) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g\n", lev.label.c_str(),
                      lev.omega, lev.psi0_sq, lev.omega_bar);
        lf << buf;
    }
    std::ofstream af(alpha_path);
    if (!af) throw IoError("atom: cannot write " + alpha_path);
    af << "level_from,level_to,alpha\n";
    for (const auto& [key, a] : m.alpha) {
        std::snprintf(buf, sizeof buf, "%s,%s,%.17g\n", key.first.c_str(),
                      key.second.c_str(), a);
        af << buf;
    }
}

}  // namespace opalshift

#endif
