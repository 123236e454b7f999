#ifndef OPALSHIFT_SOLVER_HPP
#define OPALSHIFT_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "opalshift/atom.hpp"
#include "opalshift/quadrature.hpp"

namespace opalshift {

struct SolverConfig {
    double window_alpha_mult = 1e4;  // root window = mult * alpha_max * omega_scale
    int scan_points = 100000;
    double rel_tol = 1e-10;
};

struct ShiftResult {
    std::string level;
    Vec3 position;
    double lattice_constant = 0.0;   // meters
    double shift = 0.0;              // omega* - omega_l, rad/s
    double shift_reduced = 0.0;      // shift * a / (2 pi c)
    double shift_vacuum = 0.0;       // Delta_l^0, rad/s
    int n_roots_found = 0;
    std::vector<double> roots;       // all omega* found in the window, rad/s
    enum class Method { full_eq_sum, decomposed } method = Method::full_eq_sum;
};

struct LineShape {
    std::vector<double> omega;      // rad/s
    std::vector<double> gamma;      // rad/s
    std::vector<double> delta;      // rad/s
    std::vector<double> amplitude;  // C_i(omega), 1/(rad/s)
    struct Pole {
        double omega = 0.0;
        double weight = 0.0;
    };
    std::vector<Pole> poles;  // bound contributions where Gamma = 0
};

/// Shift/decay evaluator for one (spectral function, position, atom, level).
/// Holds the principal-value kernels so repeated evaluations (root scans,
/// lineshape grids) reuse the tabulated integrand.
class LevelSolver {
public:
    LevelSolver(const SpectralFunction& sf, std::size_t pos, const AtomModel& model,
                std::string level, double lattice_constant_m,
                const QuadratureConfig& qcfg, SolverConfig scfg = {})
        : sf_(&sf),
          pos_(pos),
          model_(&model),
          level_(std::move(level)),
          a_m_(lattice_constant_m),
          qcfg_(qcfg),
          scfg_(scfg),
          kernel_full_(sf, pos, qcfg, false),
          kernel_corr_(sf, pos, qcfg, true),
          channels_(model.channels(level_)),
          omega_l_(model.level(level_).omega),
          u_rel_(qcfg.u_rel(lattice_constant_m)) {}

    double omega_l() const { return omega_l_; }
    const std::vector<Channel>& channels() const { return channels_; }

    double reduced(double omega) const {
        return constants::reduced_frequency(omega, a_m_);
    }

    /// Gamma(omega) = sum_j alpha_lj g(r, omega - omega_j); channels with
    /// omega - omega_j <= 0 see no modes and contribute nothing
    double gamma(double omega) const {
        double acc = 0.0;
        for (const auto& ch : channels_) {
            const double det = omega - ch.omega_j;
            if (det <= 0.0) continue;
            acc += ch.alpha * sf_->value_at(pos_, reduced(det));
        }
        return acc * constants::angular_frequency(1.0, a_m_);  // reduced g -> rad/s
    }

    /// Delta(omega) = sum_j (alpha_lj / 2 pi) (omega - omega_j) beta(r, omega - omega_j)
    double delta(double omega) const {
        double acc = 0.0;
        for (const auto& ch : channels_) {
            const double det = omega - ch.omega_j;
            const double b = beta_with_tail(kernel_full_, reduced(det), u_rel_);
            acc += ch.alpha / (2.0 * constants::pi) * det * b;
        }
        return acc;
    }

    /// the crystal correction term of the decomposed equation: real-photon
    /// channels only, vacuum-subtracted kernel, no tail
    double delta_correction(double omega) const {
        double acc = 0.0;
        for (const auto& ch : channels_) {
            if (ch.virtual_lump) continue;
            const double det = omega - ch.omega_j;
            acc += ch.alpha / (2.0 * constants::pi) * det *
                   kernel_corr_.principal_value(reduced(det));
        }
        return acc;
    }

    ShiftResult solve_full() const {
        return solve([this](double w) { return (w - omega_l_) - delta(w); },
                     ShiftResult::Method::full_eq_sum, /*offset=*/0.0);
    }

    /// omega - omega_l - Delta_l^0 = correction(omega); for levels without
    /// real-photon channels the equation is linear and solved exactly
    ShiftResult solve_decomposed() const {
        const double d0 = vacuum_lamb_shift(*model_, level_, qcfg_.omega_rel).delta0;
        bool has_real = false;
        for (const auto& ch : channels_)
            if (!ch.virtual_lump) has_real = true;
        if (!has_real) {
            ShiftResult r = make_result(omega_l_ + d0, 1, ShiftResult::Method::decomposed);
            r.roots = {omega_l_ + d0};
            return r;
        }
        return solve(
            [this, d0](double w) { return (w - omega_l_) - d0 - delta_correction(w); },
            ShiftResult::Method::decomposed, d0);
    }

    LineShape lineshape(const std::vector<double>& omega_grid) const {
        LineShape ls;
        ls.omega = omega_grid;
        const std::size_t n = omega_grid.size();
        ls.gamma.resize(n);
        ls.delta.resize(n);
        ls.amplitude.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double w = omega_grid[i];
            const double G = gamma(w);
            const double D = delta(w);
            ls.gamma[i] = G;
            ls.delta[i] = D;
            if (G > 0.0) {
                const double x = w - omega_l_ - D;
                ls.amplitude[i] =
                    (G / 2.0) / (constants::pi * (x * x + G * G / 4.0));
            } else {
                ls.amplitude[i] = 0.0;  // bound contributions reported as poles
            }
        }
        // poles: roots of omega - omega_l - Delta inside Gamma = 0 stretches
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (ls.gamma[i] > 0.0 || ls.gamma[i + 1] > 0.0) continue;
            const double h0 = omega_grid[i] - omega_l_ - ls.delta[i];
            const double h1 = omega_grid[i + 1] - omega_l_ - ls.delta[i + 1];
            if (h0 == 0.0 || h0 * h1 > 0.0) continue;
            double a = omega_grid[i], b = omega_grid[i + 1], fa = h0;
            for (int it = 0; it < 200 && (b - a) > scfg_.rel_tol * std::abs(b); ++it) {
                const double mid = 0.5 * (a + b);
                const double fm = mid - omega_l_ - delta(mid);
                if (fa * fm <= 0.0)
                    b = mid;
                else {
                    a = mid;
                    fa = fm;
                }
            }
            const double w_pole = 0.5 * (a + b);
            // residue weight 1/(1 - dDelta/domega), central differences
            const double h = std::max(1e-9 * std::abs(w_pole), 1.0);
            const double dD = (delta(w_pole + h) - delta(w_pole - h)) / (2.0 * h);
            ls.poles.push_back({w_pole, 1.0 / (1.0 - dD)});
        }
        return ls;
    }

    /// scan window half-width around omega_l
    double window() const {
        double alpha_max = 0.0, det_max = 0.0;
        for (const auto& ch : channels_) {
            alpha_max = std::max(alpha_max, ch.alpha);
            det_max = std::max(det_max, std::abs(omega_l_ - ch.omega_j));
        }
        const double scale = std::max(omega_l_, det_max);
        double w = scfg_.window_alpha_mult * alpha_max * scale;
        if (w <= 0.0) w = 1e-8 * std::max(scale, 1.0);
        // stay well inside the spacing to the adjacent levels
        for (const auto& lev : model_->levels) {
            const double d = std::abs(lev.omega - omega_l_);
            if (d > 1e-6 * std::max(omega_l_, 1.0)) w = std::min(w, 0.45 * d);
        }
        return w;
    }

private:
    template <class F>
    ShiftResult solve(const F& h, ShiftResult::Method method, double offset) const {
        (void)offset;
        const double W = window();
        const double lo = omega_l_ - W, hi = omega_l_ + W;
        const int n = std::max(scfg_.scan_points, 16);
        const double step = (hi - lo) / n;
        std::vector<double> roots;
        double prev_w = lo, prev_h = h(lo);
        for (int i = 1; i <= n; ++i) {
            const double w = lo + i * step;
            const double hw = h(w);
            if (prev_h == 0.0) {
                roots.push_back(prev_w);
            } else if (prev_h * hw < 0.0) {
                double a = prev_w, b = w, fa = prev_h;
                const double tol = scfg_.rel_tol * std::max(std::abs(omega_l_), W);
                for (int it = 0; it < 200 && (b - a) > tol; ++it) {
                    const double mid = 0.5 * (a + b);
                    const double fm = h(mid);
                    if (fa * fm <= 0.0)
                        b = mid;
                    else {
                        a = mid;
                        fa = fm;
                    }
                }
                roots.push_back(0.5 * (a + b));
            }
            prev_w = w;
            prev_h = hw;
        }
        if (roots.empty())
            throw std::runtime_error(
                "solve_shift: no root in the window around level " + level_ +
                " (window " + std::to_string(W) + " rad/s); widen the window or "
                "inspect Delta(omega)");
        double best = roots.front();
        for (double r : roots)
            if (std::abs(r - omega_l_) < std::abs(best - omega_l_)) best = r;
        ShiftResult res = make_result(best, static_cast<int>(roots.size()), method);
        res.roots = std::move(roots);
        return res;
    }

    ShiftResult make_result(double omega_star, int n_roots,
                            ShiftResult::Method method) const {
        ShiftResult r;
        r.level = level_;
        r.position = sf_->positions[pos_];
        r.lattice_constant = a_m_;
        r.shift = omega_star - omega_l_;
        r.shift_reduced = constants::reduced_frequency(r.shift, a_m_);
        r.shift_vacuum = vacuum_lamb_shift(*model_, level_, qcfg_.omega_rel).delta0;
        r.n_roots_found = n_roots;
        r.method = method;
        return r;
    }

    const SpectralFunction* sf_;
    std::size_t pos_;
    const AtomModel* model_;
    std::string level_;
    double a_m_;
    QuadratureConfig qcfg_;
    SolverConfig scfg_;
    PvKernel kernel_full_;
    PvKernel kernel_corr_;
    std::vector<Channel> channels_;
    double omega_l_;
    double u_rel_;
};

}  // namespace opalshift

#endif
