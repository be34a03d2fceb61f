#include "abcage/experiments.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "abcage/errors.hpp"

namespace abcage {

namespace {

Matrix2 spin_flip_m() {
    Matrix2 m;
    m << 0, 1, 1, 0;
    return m;
}

Matrix2 diag_m(Complex a, Complex b) {
    Matrix2 m = Matrix2::Zero();
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

// First-order caging, Abelian: U1 = U4 = flip, U2 = U3 = diag(-1, 1).
Plaquette abelian_caging_plaquette() {
    return {UnitaryLink(spin_flip_m()), UnitaryLink(diag_m(-1, 1)), UnitaryLink(diag_m(-1, 1)),
            UnitaryLink(spin_flip_m())};
}

// First-order caging for the out-of-phase spinor only: U1 = U2 = U3 = 1, U4 = flip.
Plaquette nonabelian_caging_plaquette() {
    return {UnitaryLink::identity(), UnitaryLink::identity(), UnitaryLink::identity(),
            UnitaryLink(spin_flip_m())};
}

// Second-order caging: U1 = diag(-1, 1), U2 = 1, U3 = diag(1, -1), U4 = flip.
Plaquette second_order_plaquette() {
    return {UnitaryLink(diag_m(-1, 1)), UnitaryLink::identity(), UnitaryLink(diag_m(1, -1)),
            UnitaryLink(spin_flip_m())};
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
    int k = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
    k = std::clamp(k, 1, static_cast<int>(std::max<std::size_t>(count, 1)));
    if (k == 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(k);
    for (int w = 0; w < k; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

// Shared propagation core with the inline conservation checks.
Trajectory propagate(const Scenario& sc, const std::vector<double>& times) {
    const Eigen::MatrixXcd H = build_hamiltonian(sc.lattice);
    Trajectory traj;
    if (sc.noise) {
        const Eigen::MatrixXcd rho0 = prepare_thermal_state(
            sc.initial.manifold, sc.initial.phonon, sc.initial.spinor, sc.noise->initial_nbar,
            sc.lattice);
        traj = evolve_lindblad(H, rho0, *sc.noise, times, sc.lattice);
        if (traj.max_trace_drift >= 1e-7 || traj.max_hermiticity_drift >= 1e-8 ||
            traj.min_eigenvalue < -1e-6) {
            std::ostringstream msg;
            msg << "open-system conservation violated in scenario '" << sc.name
                << "': trace drift " << traj.max_trace_drift << ", hermiticity drift "
                << traj.max_hermiticity_drift << ", min eigenvalue " << traj.min_eigenvalue;
            throw NumericalError(msg.str());
        }
    } else {
        const Eigen::VectorXcd psi0 =
            prepare_state(sc.initial.manifold, sc.initial.phonon, sc.initial.spinor, sc.lattice);
        traj = evolve_unitary(H, psi0, times);
    }
    for (std::size_t k = 0; k < traj.populations.size(); ++k) {
        double total = 0.0;
        for (const double v : traj.populations[k]) total += v;
        if (std::abs(total - 1.0) > 1e-6) {
            std::ostringstream msg;
            msg << "population sum " << total << " at t=" << traj.times[k] << " ms in scenario '"
                << sc.name << "'";
            throw NumericalError(msg.str());
        }
    }
    return traj;
}

double observable_p0(const Scenario& sc, double t_obs) {
    std::vector<double> times;
    if (t_obs > 0.0) times = {0.0, t_obs};
    else times = {0.0};
    const Trajectory traj = propagate(sc, times);
    return p0_from_populations(traj.populations.back());
}

std::vector<double> phase_grid(int points) {
    std::vector<double> values(points);
    for (int k = 0; k < points; ++k)
        values[k] = 2.0 * std::numbers::pi * k / (points - 1);
    return values;
}

} // namespace

Plaquette family_plaquette(PlaquetteFamily family, double phi) {
    const Complex phase = std::polar(1.0, phi);
    switch (family) {
    case PlaquetteFamily::fig4_abelian:
        return {UnitaryLink(spin_flip_m()), UnitaryLink(diag_m(phase, 1)),
                UnitaryLink(diag_m(phase, 1)), UnitaryLink(spin_flip_m())};
    case PlaquetteFamily::fig4_nonabelian:
        return {UnitaryLink(diag_m(phase, 1)), UnitaryLink::identity(),
                UnitaryLink(diag_m(1, phase)), UnitaryLink(spin_flip_m())};
    }
    throw std::logic_error("unknown plaquette family");
}

std::vector<double> TimeGrid::grid() const {
    if (points < 1) throw std::invalid_argument("time grid needs at least one point");
    if (stop < start || start < 0) throw std::invalid_argument("time grid must be nonnegative and ordered");
    std::vector<double> out(points);
    if (points == 1) {
        out[0] = start;
        return out;
    }
    for (int k = 0; k < points; ++k) out[k] = start + (stop - start) * k / (points - 1);
    return out;
}

void Scenario::validate() const {
    lattice.validate();
    if (initial.phonon < 0 || initial.phonon > lattice.cutoff)
        throw std::invalid_argument("initial phonon outside cutoff");
    if (std::abs(initial.spinor.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("initial spinor must be normalized");
    (void)times.grid();
    if (noise) noise->validate();
    if (sweep) {
        if (sweep->values.empty()) throw std::invalid_argument("sweep needs at least one value");
        if (sweep->observable_time < times.start || sweep->observable_time > times.stop)
            throw std::invalid_argument("sweep observable_time outside the scenario time grid");
        if (sweep->parameter == SweepParameter::coupling_phase && !sweep->family)
            throw std::invalid_argument("coupling_phase sweep requires a plaquette family");
        if (sweep->parameter == SweepParameter::initial_phase && sweep->family)
            throw std::invalid_argument("plaquette family is only valid for coupling_phase sweeps");
    }
}

ResultTable run_scenario(const Scenario& s, const RunOptions& opts) {
    Scenario sc = s;
    if (opts.ideal) sc.noise.reset();
    sc.validate();

    const std::vector<double> times = sc.times.grid();
    const Trajectory traj = propagate(sc, times);

    ResultTable table;
    table.comments.push_back("scenario: " + sc.name);
    table.columns.push_back("time_ms");
    for (int i = 0; i < sc.lattice.dimension(); ++i)
        table.columns.push_back(site_label(index_to_site(i, sc.lattice)));
    table.columns.push_back("P0");
    for (std::size_t k = 0; k < times.size(); ++k) {
        std::vector<double> row;
        row.reserve(table.columns.size());
        row.push_back(times[k]);
        row.insert(row.end(), traj.populations[k].begin(), traj.populations[k].end());
        row.push_back(p0_from_populations(traj.populations[k]));
        table.rows.push_back(std::move(row));
    }
    return table;
}

ResultTable run_sweep(const Scenario& s, const RunOptions& opts) {
    Scenario base = s;
    if (opts.ideal) base.noise.reset();
    base.validate();
    if (!base.sweep) throw ConfigError("scenario has no sweep block");
    const SweepSpec sweep = *base.sweep;
    base.sweep.reset();

    const bool coupling = sweep.parameter == SweepParameter::coupling_phase;
    ResultTable table;
    table.comments.push_back("scenario: " + s.name);
    table.columns = {"phi_over_pi", "P0"};
    if (coupling) {
        table.columns.insert(table.columns.end(),
                             {"wilson_main", "wilson_holonomy", "abelian_main", "theta_main_over_pi"});
    }
    table.rows.assign(sweep.values.size(), {});

    parallel_for(sweep.values.size(), opts.workers, [&](std::size_t i) {
        const double phi = sweep.values[i];
        Scenario point = base;
        point.name += " [phi/pi=" + std::to_string(phi / std::numbers::pi) + "]";
        if (coupling) {
            point.lattice.plaquette = family_plaquette(*sweep.family, phi);
        } else {
            point.initial.spinor = spinor_relative_phase(phi);
        }
        std::vector<double> row = {phi / std::numbers::pi,
                                   observable_p0(point, sweep.observable_time)};
        if (coupling) {
            const Plaquette& pl = point.lattice.plaquette;
            row.push_back(wilson_loop(pl, LoopOrdering::main_text));
            row.push_back(wilson_loop(pl, LoopOrdering::holonomy));
            const PlaquetteClass cls = classify_plaquette(pl, 1e-9, LoopOrdering::main_text);
            row.push_back(cls.abelian ? 1.0 : 0.0);
            row.push_back(cls.theta ? *cls.theta / std::numbers::pi
                                    : std::numeric_limits<double>::quiet_NaN());
        }
        table.rows[i] = std::move(row);
    });
    return table;
}

namespace {

Scenario make_trajectory_scenario(const std::string& name, const Plaquette& p, Manifold manifold,
                                  int phonon, const Spinor& spinor) {
    Scenario sc;
    sc.name = name;
    sc.lattice.plaquette = p;
    sc.initial = {manifold, phonon, spinor};
    sc.times = TimeGrid{};
    sc.noise = NoiseModel{};
    return sc;
}

ResultTable run_phase_heatmap(const Scenario& base_in, const RunOptions& opts) {
    const std::vector<double> phis = phase_grid(17);
    const std::vector<double> times = base_in.times.grid();
    std::vector<std::vector<double>> p0_curves(phis.size());
    parallel_for(phis.size(), opts.workers, [&](std::size_t i) {
        Scenario point = base_in;
        if (opts.ideal) point.noise.reset();
        point.initial.spinor = spinor_relative_phase(phis[i]);
        p0_curves[i] = propagate(point, times).p0_series();
    });
    ResultTable table;
    table.comments.push_back("scenario: " + base_in.name);
    table.columns = {"phi_over_pi", "time_ms", "P0"};
    for (std::size_t i = 0; i < phis.size(); ++i) {
        for (std::size_t k = 0; k < times.size(); ++k) {
            table.rows.push_back({phis[i] / std::numbers::pi, times[k], p0_curves[i][k]});
        }
    }
    return table;
}

ResultTable run_wilson_pair(const RunOptions& opts) {
    ResultTable table;
    table.columns = {"wilson_main", "wilson_holonomy", "wilson_protocol"};
    table.row_labels = {"abelian", "nonabelian"};
    const Plaquette plaquettes[2] = {abelian_caging_plaquette(), nonabelian_caging_plaquette()};
    for (const Plaquette& p : plaquettes) {
        LatticeConfig config;
        config.plaquette = p;
        std::optional<NoiseModel> noise;
        if (!opts.ideal) noise = NoiseModel{};
        table.rows.push_back({wilson_loop(p, LoopOrdering::main_text),
                              wilson_loop(p, LoopOrdering::holonomy),
                              wilson_loop_protocol(p, config, noise)});
    }
    return table;
}

std::map<std::string, Preset> build_registry() {
    std::map<std::string, Preset> reg;

    auto add_scenario_preset = [&reg](const std::string& name, const std::string& description,
                                      std::function<Scenario()> make) {
        Preset preset;
        preset.name = name;
        preset.description = description;
        preset.scenario = make;
        preset.run = [make](const RunOptions& opts) {
            const Scenario sc = make();
            return sc.sweep ? run_sweep(sc, opts) : run_scenario(sc, opts);
        };
        reg[name] = std::move(preset);
    };
    auto add_composite = [&reg](const std::string& name, const std::string& description,
                                std::function<ResultTable(const RunOptions&)> run) {
        Preset preset;
        preset.name = name;
        preset.description = description;
        preset.composite = true;
        preset.run = std::move(run);
        reg[name] = std::move(preset);
    };

    add_scenario_preset("fig2a", "first-order caging, Abelian links, out-of-phase spinor at A0", [] {
        return make_trajectory_scenario("fig2a", abelian_caging_plaquette(), Manifold::A, 0,
                                        spinor_out_of_phase());
    });
    add_scenario_preset("fig2b", "first-order caging, non-Abelian links, out-of-phase spinor at A0",
                        [] {
                            return make_trajectory_scenario("fig2b", nonabelian_caging_plaquette(),
                                                            Manifold::A, 0, spinor_out_of_phase());
                        });
    add_scenario_preset("fig2c", "Abelian links, in-phase spinor at A0 (still caged)", [] {
        return make_trajectory_scenario("fig2c", abelian_caging_plaquette(), Manifold::A, 0,
                                        spinor_in_phase());
    });
    add_scenario_preset("fig2d", "non-Abelian links, in-phase spinor at A0 (spreads)", [] {
        return make_trajectory_scenario("fig2d", nonabelian_caging_plaquette(), Manifold::A, 0,
                                        spinor_in_phase());
    });
    add_composite("fig2e-abelian", "P0 over time and initial phase, Abelian links",
                  [](const RunOptions& opts) {
                      const Scenario base = make_trajectory_scenario(
                          "fig2e-abelian", abelian_caging_plaquette(), Manifold::A, 0,
                          spinor_out_of_phase());
                      return run_phase_heatmap(base, opts);
                  });
    add_composite("fig2e-nonabelian", "P0 over time and initial phase, non-Abelian links",
                  [](const RunOptions& opts) {
                      const Scenario base = make_trajectory_scenario(
                          "fig2e-nonabelian", nonabelian_caging_plaquette(), Manifold::A, 0,
                          spinor_out_of_phase());
                      return run_phase_heatmap(base, opts);
                  });
    add_scenario_preset("fig2f-abelian", "P0 vs initial phase at t = 0.15 ms, Abelian links", [] {
        Scenario sc = make_trajectory_scenario("fig2f-abelian", abelian_caging_plaquette(),
                                               Manifold::A, 0, spinor_out_of_phase());
        sc.sweep = SweepSpec{SweepParameter::initial_phase, phase_grid(17), 0.15, std::nullopt};
        return sc;
    });
    add_scenario_preset("fig2f-nonabelian", "P0 vs initial phase at t = 0.15 ms, non-Abelian links",
                        [] {
                            Scenario sc = make_trajectory_scenario(
                                "fig2f-nonabelian", nonabelian_caging_plaquette(), Manifold::A, 0,
                                spinor_out_of_phase());
                            sc.sweep = SweepSpec{SweepParameter::initial_phase, phase_grid(17),
                                                 0.15, std::nullopt};
                            return sc;
                        });
    add_scenario_preset("fig3b", "second-order caging, spin-down at A0, population stays in n <= 1",
                        [] {
                            return make_trajectory_scenario("fig3b", second_order_plaquette(),
                                                            Manifold::A, 0, spinor_down());
                        });
    add_scenario_preset("fig3d",
                        "asymmetric caging from A2: first order rightward, second order leftward",
                        [] {
                            Spinor s;
                            s << 1.0 / std::numbers::sqrt2, -1.0 / std::numbers::sqrt2;
                            return make_trajectory_scenario("fig3d", second_order_plaquette(),
                                                            Manifold::A, 2, s);
                        });
    add_scenario_preset("fig4-abelian", "P0 vs coupling phase at t = 0.2 ms, Abelian family", [] {
        Scenario sc = make_trajectory_scenario("fig4-abelian",
                                               family_plaquette(PlaquetteFamily::fig4_abelian, 0.0),
                                               Manifold::A, 0, spinor_down());
        sc.sweep = SweepSpec{SweepParameter::coupling_phase, phase_grid(17), 0.2,
                             PlaquetteFamily::fig4_abelian};
        return sc;
    });
    add_scenario_preset("fig4-nonabelian", "P0 vs coupling phase at t = 0.2 ms, non-Abelian family",
                        [] {
                            Scenario sc = make_trajectory_scenario(
                                "fig4-nonabelian",
                                family_plaquette(PlaquetteFamily::fig4_nonabelian, 0.0), Manifold::A,
                                0, spinor_down());
                            sc.sweep = SweepSpec{SweepParameter::coupling_phase, phase_grid(17), 0.2,
                                                 PlaquetteFamily::fig4_nonabelian};
                            return sc;
                        });
    add_composite("fig4", "coupling-phase sweep of both families in one table",
                  [](const RunOptions& opts) {
                      const ResultTable a = run_preset("fig4-abelian", opts);
                      const ResultTable b = run_preset("fig4-nonabelian", opts);
                      ResultTable merged;
                      merged.columns = {"phi_over_pi", "P0_abelian", "P0_nonabelian"};
                      for (std::size_t i = 0; i < a.rows.size(); ++i)
                          merged.rows.push_back({a.rows[i][0], a.rows[i][1], b.rows[i][1]});
                      return merged;
                  });
    add_composite("figS2", "algebraic and protocol Wilson loops for both caging configurations",
                  [](const RunOptions& opts) { return run_wilson_pair(opts); });

    return reg;
}

} // namespace

const std::map<std::string, Preset>& preset_registry() {
    static const std::map<std::string, Preset> registry = build_registry();
    return registry;
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [name, preset] : preset_registry()) names.push_back(name);
    return names;
}

Scenario preset_scenario(const std::string& name) {
    const auto& reg = preset_registry();
    const auto it = reg.find(name);
    if (it == reg.end()) throw ConfigError("unknown preset '" + name + "'");
    if (it->second.composite)
        throw ConfigError("preset '" + name + "' is composite and has no single scenario");
    return it->second.scenario();
}

ResultTable run_preset(const std::string& name, const RunOptions& opts) {
    const auto& reg = preset_registry();
    const auto it = reg.find(name);
    if (it == reg.end()) throw ConfigError("unknown preset '" + name + "'");
    return it->second.run(opts);
}

} // namespace abcage
