#ifndef OPALSHIFT_CONFIG_HPP
#define OPALSHIFT_CONFIG_HPP

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "opalshift/errors.hpp"
#include "opalshift/crystal.hpp"
#include "opalshift/ensemble.hpp"
#include "opalshift/lsrf.hpp"
#include "opalshift/quadrature.hpp"
#include "opalshift/solver.hpp"

namespace opalshift {

using json = nlohmann::ordered_json;

/// Run configuration, one flat key group per module. Parses from / serializes
/// to JSON; parse(serialize(c)) is the identical document.
struct RunConfig {
    CrystalStructure crystal;
    double gmax = 6.9282;  // |G| a/2pi cutoff; 6.9282 -> 339 plane waves, 5.6569 -> 181
    int mesh_n1 = 16, mesh_n2 = 16, mesh_n3 = 16;
    double u_max = 3.5;
    int n_bins = 700;
    BroadeningConfig broadening;
    QuadratureConfig quadrature;
    std::vector<Vec3> positions = {{0, 0, 0}, {0.34, 0, 0}, {0.24, 0.24, 0}};
    // atom
    std::string atom_kind = "hydrogen";  // or "table"
    int hydrogen_n_max = 4;
    double bethe_ry_above_ground = 19.8;
    std::string atom_levels_file, atom_alpha_file;
    std::string level = "2p";
    // lattice-constant sweep (shift subcommand)
    double sweep_a_min_nm = 60.0, sweep_a_max_nm = 140.0;
    int sweep_steps = 20;
    std::vector<std::string> sweep_levels = {"2s", "2p"};
    // ensemble
    EnsembleSpec ensemble;
    int ensemble_hist_bins = 24;
    // lineshape
    int lineshape_points = 4001;
    double lineshape_half_width_gammas = 60.0;
    // beta subcommand detuning grid (reduced units)
    double beta_delta_min = 0.05, beta_delta_max = 2.0;
    int beta_delta_steps = 120;
    SolverConfig solver;
    int workers = 0;  // 0 = hardware concurrency

    json to_json() const {
        json j;
        j["crystal"] = {{"lattice_constant_nm", crystal.lattice_constant * 1e9},
                        {"eps_sphere", crystal.eps_sphere},
                        {"eps_background", crystal.eps_background},
                        {"filling_fraction", crystal.filling_fraction}};
        j["basis"] = {{"gmax", gmax}};
        j["mesh"] = {{"n1", mesh_n1}, {"n2", mesh_n2}, {"n3", mesh_n3}};
        j["freq_grid"] = {{"u_max", u_max}, {"n_bins", n_bins}};
        j["broadening"] = {
            {"mode", broadening.mode == BroadeningConfig::Mode::adaptive ? "adaptive"
                                                                         : "fixed"},
            {"velocity_factor", broadening.velocity_factor},
            {"floor_bins", broadening.floor_bins},
            {"fixed_bins", broadening.fixed_bins}};
        j["quadrature"] = {{"u_op", quadrature.u_op},
                           {"omega_rel_rad_s", quadrature.omega_rel},
                           {"rel_tol", quadrature.rel_tol},
                           {"abs_tol", quadrature.abs_tol}};
        j["positions"] = json::array();
        for (const auto& p : positions) j["positions"].push_back({p.x, p.y, p.z});
        j["atom"] = {{"kind", atom_kind},
                     {"n_max", hydrogen_n_max},
                     {"bethe_ry_above_ground", bethe_ry_above_ground},
                     {"levels_file", atom_levels_file},
                     {"alpha_file", atom_alpha_file},
                     {"level", level}};
        j["sweep"] = {{"a_min_nm", sweep_a_min_nm},
                      {"a_max_nm", sweep_a_max_nm},
                      {"steps", sweep_steps},
                      {"levels", sweep_levels}};
        j["ensemble"] = {
            {"n_atoms", ensemble.n_atoms},
            {"region",
             ensemble.region == EnsembleSpec::Region::air_pores ? "air_pores" : "full_cell"},
            {"seed", ensemble.rng_seed},
            {"hist_bins", ensemble_hist_bins}};
        j["lineshape"] = {{"n_points", lineshape_points},
                          {"half_width_gammas", lineshape_half_width_gammas}};
        j["beta_grid"] = {{"delta_min", beta_delta_min},
                          {"delta_max", beta_delta_max},
                          {"steps", beta_delta_steps}};
        j["solver"] = {{"window_alpha_mult", solver.window_alpha_mult},
                       {"scan_points", solver.scan_points},
                       {"rel_tol", solver.rel_tol}};
        j["workers"] = workers;
        return j;
    }

    static RunConfig from_json(const json& j) {
        RunConfig c;
        try {
            if (j.contains("crystal")) {
                const auto& s = j.at("crystal");
                if (s.contains("lattice_constant_nm"))
                    c.crystal.lattice_constant = s.at("lattice_constant_nm").get<double>() * 1e-9;
                if (s.contains("eps_sphere")) c.crystal.eps_sphere = s.at("eps_sphere");
                if (s.contains("eps_background"))
                    c.crystal.eps_background = s.at("eps_background");
                if (s.contains("filling_fraction"))
                    c.crystal.filling_fraction = s.at("filling_fraction");
            }
            if (j.contains("basis") && j.at("basis").contains("gmax"))
                c.gmax = j.at("basis").at("gmax");
            if (j.contains("mesh")) {
                c.mesh_n1 = j.at("mesh").value("n1", 16);
                c.mesh_n2 = j.at("mesh").value("n2", 16);
                c.mesh_n3 = j.at("mesh").value("n3", 16);
            }
            if (j.contains("freq_grid")) {
                c.u_max = j.at("freq_grid").value("u_max", 3.5);
                c.n_bins = j.at("freq_grid").value("n_bins", 700);
            }
            if (j.contains("broadening")) {
                const auto& b = j.at("broadening");
                const std::string mode = b.value("mode", "adaptive");
                if (mode == "adaptive")
                    c.broadening.mode = BroadeningConfig::Mode::adaptive;
                else if (mode == "fixed")
                    c.broadening.mode = BroadeningConfig::Mode::fixed;
                else
                    throw ConfigError("broadening.mode must be 'adaptive' or 'fixed'");
                c.broadening.velocity_factor = b.value("velocity_factor", 0.7);
                c.broadening.floor_bins = b.value("floor_bins", 1.5);
                c.broadening.fixed_bins = b.value("fixed_bins", 1.5);
            }
            if (j.contains("quadrature")) {
                const auto& q = j.at("quadrature");
                c.quadrature.u_op = q.value("u_op", 3.5);
                c.quadrature.omega_rel =
                    q.value("omega_rel_rad_s", constants::omega_rel_default);
                c.quadrature.rel_tol = q.value("rel_tol", 1e-6);
                c.quadrature.abs_tol = q.value("abs_tol", 1e-12);
            }
            if (j.contains("positions")) {
                c.positions.clear();
                for (const auto& p : j.at("positions"))
                    c.positions.push_back({p.at(0), p.at(1), p.at(2)});
            }
            if (j.contains("atom")) {
                const auto& a = j.at("atom");
                c.atom_kind = a.value("kind", "hydrogen");
                c.hydrogen_n_max = a.value("n_max", 4);
                c.bethe_ry_above_ground = a.value("bethe_ry_above_ground", 19.8);
                c.atom_levels_file = a.value("levels_file", "");
                c.atom_alpha_file = a.value("alpha_file", "");
                c.level = a.value("level", "2p");
            }
            if (j.contains("sweep")) {
                c.sweep_a_min_nm = j.at("sweep").value("a_min_nm", 60.0);
                c.sweep_a_max_nm = j.at("sweep").value("a_max_nm", 140.0);
                c.sweep_steps = j.at("sweep").value("steps", 20);
                if (j.at("sweep").contains("levels"))
                    c.sweep_levels =
                        j.at("sweep").at("levels").get<std::vector<std::string>>();
            }
            if (j.contains("ensemble")) {
                const auto& e = j.at("ensemble");
                c.ensemble.n_atoms = e.value("n_atoms", 200);
                const std::string region = e.value("region", "air_pores");
                if (region == "air_pores")
                    c.ensemble.region = EnsembleSpec::Region::air_pores;
                else if (region == "full_cell")
                    c.ensemble.region = EnsembleSpec::Region::full_cell;
                else
                    throw ConfigError("ensemble.region must be 'air_pores' or 'full_cell'");
                c.ensemble.rng_seed = e.value("seed", std::uint64_t(12345));
                c.ensemble_hist_bins = e.value("hist_bins", 24);
            }
            if (j.contains("lineshape")) {
                c.lineshape_points = j.at("lineshape").value("n_points", 4001);
                c.lineshape_half_width_gammas =
                    j.at("lineshape").value("half_width_gammas", 60.0);
            }
            if (j.contains("beta_grid")) {
                c.beta_delta_min = j.at("beta_grid").value("delta_min", 0.05);
                c.beta_delta_max = j.at("beta_grid").value("delta_max", 2.0);
                c.beta_delta_steps = j.at("beta_grid").value("steps", 120);
            }
            if (j.contains("solver")) {
                const auto& s = j.at("solver");
                c.solver.window_alpha_mult = s.value("window_alpha_mult", 1e4);
                c.solver.scan_points = s.value("scan_points", 100000);
                c.solver.rel_tol = s.value("rel_tol", 1e-10);
            }
            c.workers = j.value("workers", 0);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config: malformed document: ") + e.what());
        }
        c.ensemble.level = c.level;
        c.ensemble.lattice_constant = c.crystal.lattice_constant;
        c.validate();
        return c;
    }

    static RunConfig load(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw ConfigError("config: cannot open '" + path + "'");
        json j;
        try {
            f >> j;
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config: JSON parse error in '") + path +
                              "': " + e.what());
        }
        return from_json(j);
    }

    void validate() const {
        crystal.validate();  // throws with actionable messages
        if (!(gmax > 1.8))
            throw ConfigError("basis.gmax must exceed sqrt(3) (at least one G shell)");
        if (mesh_n1 < 1 || mesh_n2 < 1 || mesh_n3 < 1)
            throw ConfigError("mesh dimensions must be >= 1");
        if (!(u_max > 0) || n_bins < 2)
            throw ConfigError("freq_grid: need u_max > 0 and n_bins >= 2");
        if (!(quadrature.u_op <= u_max))
            throw ConfigError("quadrature.u_op " + std::to_string(quadrature.u_op) +
                              " exceeds the frequency grid u_max " + std::to_string(u_max) +
                              "; enlarge freq_grid.u_max or lower u_op");
        quadrature.validate(crystal.lattice_constant);
        if (positions.empty()) throw ConfigError("positions: need at least one");
        if (sweep_steps < 1 || !(sweep_a_min_nm > 0) || !(sweep_a_max_nm >= sweep_a_min_nm))
            throw ConfigError("sweep: need a_max_nm >= a_min_nm > 0 and steps >= 1");
        if (sweep_levels.empty()) throw ConfigError("sweep.levels must not be empty");
        if (ensemble.n_atoms < 1) throw ConfigError("ensemble.n_atoms must be >= 1");
        if (lineshape_points < 16) throw ConfigError("lineshape.n_points must be >= 16");
        if (atom_kind != "hydrogen" && atom_kind != "table")
            throw ConfigError("atom.kind must be 'hydrogen' or 'table'");
        if (atom_kind == "table" && (atom_levels_file.empty() || atom_alpha_file.empty()))
            throw ConfigError("atom.kind 'table' requires levels_file and alpha_file");
        if (beta_delta_steps < 1 || !(beta_delta_min > 0) ||
            !(beta_delta_max > beta_delta_min))
            throw ConfigError("beta_grid: need delta_max > delta_min > 0, steps >= 1");
        if (solver.scan_points < 16) throw ConfigError("solver.scan_points must be >= 16");
        if (workers < 0) throw ConfigError("workers must be >= 0");
    }

    AtomModel make_atom() const {
        if (atom_kind == "hydrogen")
            return hydrogen_model(hydrogen_n_max, bethe_ry_above_ground);
        return load_atom_csv(atom_levels_file, atom_alpha_file);
    }
};

}  // namespace opalshift

#endif
