#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "abcage/dynamics.hpp"
#include "abcage/gauge.hpp"
#include "abcage/lattice.hpp"

namespace abcage {

struct InitialState {
    Manifold manifold = Manifold::A;
    int phonon = 0;
    Spinor spinor = spinor_down();
};

enum class SweepParameter { initial_phase, coupling_phase };

/// Phase-parameterized plaquette families used by the coupling sweeps.
enum class PlaquetteFamily {
    fig4_abelian,    ///< U1 = U4 = spin flip, U2 = U3 = diag(e^{i phi}, 1)
    fig4_nonabelian, ///< U1 = diag(e^{i phi}, 1), U2 = 1, U3 = diag(1, e^{i phi}), U4 = spin flip
};

Plaquette family_plaquette(PlaquetteFamily family, double phi);

struct SweepSpec {
    SweepParameter parameter = SweepParameter::initial_phase;
    std::vector<double> values; ///< radians
    double observable_time = 0.15; ///< ms, must lie inside the scenario time grid
    std::optional<PlaquetteFamily> family; ///< required for coupling_phase
};

struct TimeGrid {
    double start = 0.0; ///< ms
    double stop = 0.5;  ///< ms
    int points = 101;

    std::vector<double> grid() const;
};

/// One reproducible run: lattice, initial state, time grid, optional noise,
/// optional sweep block.
struct Scenario {
    std::string name;
    LatticeConfig lattice;
    InitialState initial;
    TimeGrid times;
    std::optional<NoiseModel> noise;
    std::optional<SweepSpec> sweep;

    void validate() const;
};

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::string> row_labels; ///< empty, or one label per row
    std::vector<std::vector<double>> rows;
    std::vector<std::string> comments; ///< emitted as leading '#' lines in CSV
};

struct RunOptions {
    bool ideal = false; ///< strip the noise model
    std::uint64_t seed = 1;
    int workers = 0; ///< sweep concurrency; 0 picks hardware concurrency
};

/// Propagates the scenario over its time grid and tabulates per-site
/// populations plus P0. Conservation invariants are checked inline and
/// violations raise NumericalError.
ResultTable run_scenario(const Scenario& s, const RunOptions& opts = {});

/// One row per sweep value, runs independent and order-deterministic under
/// concurrency. Coupling sweeps also tabulate both Wilson-loop orderings and
/// the main-text-ordering classification.
ResultTable run_sweep(const Scenario& s, const RunOptions& opts = {});

struct Preset {
    std::string name;
    std::string description;
    bool composite = false; ///< aggregates several scenarios into one table
    std::function<Scenario()> scenario; ///< null for composite presets
    std::function<ResultTable(const RunOptions&)> run;
};

const std::map<std::string, Preset>& preset_registry();
std::vector<std::string> preset_names();
/// Scenario backing a single-scenario preset; ConfigError for composites.
Scenario preset_scenario(const std::string& name);
ResultTable run_preset(const std::string& name, const RunOptions& opts = {});

} // namespace abcage
