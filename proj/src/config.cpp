#include "abcage/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "abcage/errors.hpp"

namespace abcage {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& path, const std::string& what) {
    throw ConfigError(origin + ": " + path + ": " + what);
}

double to_rad_per_ms_from_hz(double hz) { return kTwoPi * hz * 1e-3; }

double number_at(const json& j, const std::string& origin, const std::string& path) {
    if (!j.is_number()) fail(origin, path, "expected a number");
    return j.get<double>();
}

Complex complex_entry(const json& j, const std::string& origin, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        fail(origin, path, "expected a [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

Matrix2 matrix_at(const json& j, const std::string& origin, const std::string& path) {
    if (!j.is_array() || j.size() != 2) fail(origin, path, "expected a 2x2 matrix");
    Matrix2 m;
    for (int r = 0; r < 2; ++r) {
        if (!j[r].is_array() || j[r].size() != 2) fail(origin, path, "expected a 2x2 matrix");
        for (int c = 0; c < 2; ++c) {
            m(r, c) = complex_entry(j[r][c], origin,
                                    path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
        }
    }
    return m;
}

Manifold manifold_from_string(const std::string& s, const std::string& origin,
                              const std::string& path) {
    if (s == "A") return Manifold::A;
    if (s == "B") return Manifold::B;
    if (s == "C") return Manifold::C;
    fail(origin, path, "manifold must be A, B or C");
}

void apply_lattice(LatticeConfig& lattice, const json& j, const std::string& origin) {
    if (!j.is_object()) fail(origin, "lattice", "expected an object");
    if (j.contains("J_rad_per_ms")) lattice.J = number_at(j["J_rad_per_ms"], origin, "lattice.J_rad_per_ms");
    if (j.contains("J_kHz")) lattice.J = kTwoPi * number_at(j["J_kHz"], origin, "lattice.J_kHz");
    if (j.contains("cutoff")) {
        if (!j["cutoff"].is_number_integer()) fail(origin, "lattice.cutoff", "expected an integer");
        lattice.cutoff = j["cutoff"].get<int>();
    }
    if (j.contains("translational_invariant")) {
        if (!j["translational_invariant"].is_boolean())
            fail(origin, "lattice.translational_invariant", "expected a boolean");
        lattice.translational_invariant = j["translational_invariant"].get<bool>();
    }
    if (j.contains("detuning_rad_per_ms"))
        lattice.detuning = number_at(j["detuning_rad_per_ms"], origin, "lattice.detuning_rad_per_ms");
    if (j.contains("detuning_hz"))
        lattice.detuning = to_rad_per_ms_from_hz(number_at(j["detuning_hz"], origin, "lattice.detuning_hz"));
    if (j.contains("detuning_placement")) {
        const std::string p = j["detuning_placement"].get<std::string>();
        if (p == "d_manifold") lattice.detuning_placement = DetuningPlacement::d_manifold;
        else if (p == "sigma_z_half") lattice.detuning_placement = DetuningPlacement::sigma_z_half;
        else fail(origin, "lattice.detuning_placement", "must be d_manifold or sigma_z_half");
    }
    if (j.contains("plaquette")) {
        const json& pq = j["plaquette"];
        if (!pq.is_object()) fail(origin, "lattice.plaquette", "expected an object");
        auto link = [&](const char* key, const UnitaryLink& current) {
            if (!pq.contains(key)) return current;
            try {
                return UnitaryLink(matrix_at(pq[key], origin, std::string("lattice.plaquette.") + key));
            } catch (const std::invalid_argument& e) {
                fail(origin, std::string("lattice.plaquette.") + key, e.what());
            }
        };
        lattice.plaquette.u1 = link("U1", lattice.plaquette.u1);
        lattice.plaquette.u2 = link("U2", lattice.plaquette.u2);
        lattice.plaquette.u3 = link("U3", lattice.plaquette.u3);
        lattice.plaquette.u4 = link("U4", lattice.plaquette.u4);
    }
}

void apply_initial(InitialState& initial, const json& j, const std::string& origin) {
    if (!j.is_object()) fail(origin, "initial", "expected an object");
    if (j.contains("manifold"))
        initial.manifold = manifold_from_string(j["manifold"].get<std::string>(), origin, "initial.manifold");
    if (j.contains("phonon")) {
        if (!j["phonon"].is_number_integer()) fail(origin, "initial.phonon", "expected an integer");
        initial.phonon = j["phonon"].get<int>();
    }
    if (j.contains("spinor") && j.contains("phase_over_pi"))
        fail(origin, "initial", "give either spinor or phase_over_pi, not both");
    if (j.contains("spinor")) {
        const json& sp = j["spinor"];
        if (!sp.is_array() || sp.size() != 2) fail(origin, "initial.spinor", "expected two [re, im] pairs");
        initial.spinor(0) = complex_entry(sp[0], origin, "initial.spinor[0]");
        initial.spinor(1) = complex_entry(sp[1], origin, "initial.spinor[1]");
    }
    if (j.contains("phase_over_pi")) {
        const double phase = number_at(j["phase_over_pi"], origin, "initial.phase_over_pi");
        initial.spinor = spinor_relative_phase(phase * std::numbers::pi);
    }
}

void apply_noise(std::optional<NoiseModel>& noise, const json& j, const std::string& origin) {
    if (j.is_null()) {
        noise.reset();
        return;
    }
    if (!j.is_object()) fail(origin, "noise", "expected an object or null");
    if (!noise) noise = NoiseModel{};
    if (j.contains("gamma1_per_ms")) noise->gamma1 = number_at(j["gamma1_per_ms"], origin, "noise.gamma1_per_ms");
    if (j.contains("gamma2_per_ms")) noise->gamma2 = number_at(j["gamma2_per_ms"], origin, "noise.gamma2_per_ms");
    if (j.contains("detuning_rad_per_ms"))
        noise->detuning = number_at(j["detuning_rad_per_ms"], origin, "noise.detuning_rad_per_ms");
    if (j.contains("detuning_hz"))
        noise->detuning = to_rad_per_ms_from_hz(number_at(j["detuning_hz"], origin, "noise.detuning_hz"));
    if (j.contains("initial_nbar")) noise->initial_nbar = number_at(j["initial_nbar"], origin, "noise.initial_nbar");
}

void apply_sweep(std::optional<SweepSpec>& sweep, const json& j, const std::string& origin) {
    if (j.is_null()) {
        sweep.reset();
        return;
    }
    if (!j.is_object()) fail(origin, "sweep", "expected an object or null");
    if (!sweep) sweep = SweepSpec{};
    if (j.contains("parameter")) {
        const std::string p = j["parameter"].get<std::string>();
        if (p == "initial_phase") sweep->parameter = SweepParameter::initial_phase;
        else if (p == "coupling_phase") sweep->parameter = SweepParameter::coupling_phase;
        else fail(origin, "sweep.parameter", "must be initial_phase or coupling_phase");
    }
    if (j.contains("values_over_pi")) {
        const json& vals = j["values_over_pi"];
        if (!vals.is_array() || vals.empty()) fail(origin, "sweep.values_over_pi", "expected a nonempty array");
        sweep->values.clear();
        for (std::size_t i = 0; i < vals.size(); ++i)
            sweep->values.push_back(std::numbers::pi *
                                    number_at(vals[i], origin, "sweep.values_over_pi[" + std::to_string(i) + "]"));
    }
    if (j.contains("points")) {
        if (!j["points"].is_number_integer() || j["points"].get<int>() < 2)
            fail(origin, "sweep.points", "expected an integer >= 2");
        const int points = j["points"].get<int>();
        sweep->values.clear();
        for (int k = 0; k < points; ++k)
            sweep->values.push_back(2.0 * std::numbers::pi * k / (points - 1));
    }
    if (j.contains("observable_time_ms"))
        sweep->observable_time = number_at(j["observable_time_ms"], origin, "sweep.observable_time_ms");
    if (j.contains("family")) {
        const std::string f = j["family"].get<std::string>();
        if (f == "fig4-abelian") sweep->family = PlaquetteFamily::fig4_abelian;
        else if (f == "fig4-nonabelian") sweep->family = PlaquetteFamily::fig4_nonabelian;
        else fail(origin, "sweep.family", "must be fig4-abelian or fig4-nonabelian");
    }
}

json matrix_to_json(const Matrix2& m) {
    json j = json::array();
    for (int r = 0; r < 2; ++r) {
        json row = json::array();
        for (int c = 0; c < 2; ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        j.push_back(row);
    }
    return j;
}

} // namespace

Scenario scenario_from_json_text(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        // nlohmann reports a byte offset; convert it to a line number
        std::size_t line = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i)
            if (text[i] == '\n') ++line;
        throw ConfigError(origin + ":" + std::to_string(line) + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError(origin + ": top level must be an object");

    Scenario sc;
    if (j.contains("preset")) {
        if (!j["preset"].is_string()) fail(origin, "preset", "expected a string");
        sc = preset_scenario(j["preset"].get<std::string>());
    }
    if (j.contains("name")) sc.name = j["name"].get<std::string>();
    if (sc.name.empty()) sc.name = "custom";
    if (j.contains("lattice")) apply_lattice(sc.lattice, j["lattice"], origin);
    if (j.contains("initial")) apply_initial(sc.initial, j["initial"], origin);
    if (j.contains("times")) {
        const json& t = j["times"];
        if (!t.is_object()) fail(origin, "times", "expected an object");
        if (t.contains("start_ms")) sc.times.start = number_at(t["start_ms"], origin, "times.start_ms");
        if (t.contains("stop_ms")) sc.times.stop = number_at(t["stop_ms"], origin, "times.stop_ms");
        if (t.contains("points")) {
            if (!t["points"].is_number_integer()) fail(origin, "times.points", "expected an integer");
            sc.times.points = t["points"].get<int>();
        }
    }
    if (j.contains("noise")) apply_noise(sc.noise, j["noise"], origin);
    if (j.contains("sweep")) apply_sweep(sc.sweep, j["sweep"], origin);

    try {
        sc.validate();
    } catch (const std::exception& e) {
        throw ConfigError(origin + ": invalid scenario: " + e.what());
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return scenario_from_json_text(buffer.str(), path);
}

std::string scenario_to_json_text(const Scenario& s) {
    json j;
    j["name"] = s.name;
    j["lattice"] = {
        {"J_rad_per_ms", s.lattice.J},
        {"cutoff", s.lattice.cutoff},
        {"translational_invariant", s.lattice.translational_invariant},
        {"detuning_rad_per_ms", s.lattice.detuning},
        {"detuning_placement",
         s.lattice.detuning_placement == DetuningPlacement::d_manifold ? "d_manifold" : "sigma_z_half"},
        {"plaquette",
         {{"U1", matrix_to_json(s.lattice.plaquette.u1.matrix())},
          {"U2", matrix_to_json(s.lattice.plaquette.u2.matrix())},
          {"U3", matrix_to_json(s.lattice.plaquette.u3.matrix())},
          {"U4", matrix_to_json(s.lattice.plaquette.u4.matrix())}}},
    };
    static const char* manifold_names[] = {"A", "B", "C"};
    j["initial"] = {
        {"manifold", manifold_names[static_cast<int>(s.initial.manifold)]},
        {"phonon", s.initial.phonon},
        {"spinor",
         {{s.initial.spinor(0).real(), s.initial.spinor(0).imag()},
          {s.initial.spinor(1).real(), s.initial.spinor(1).imag()}}},
    };
    j["times"] = {{"start_ms", s.times.start}, {"stop_ms", s.times.stop}, {"points", s.times.points}};
    if (s.noise) {
        j["noise"] = {{"gamma1_per_ms", s.noise->gamma1},
                      {"gamma2_per_ms", s.noise->gamma2},
                      {"detuning_rad_per_ms", s.noise->detuning},
                      {"initial_nbar", s.noise->initial_nbar}};
    } else {
        j["noise"] = nullptr;
    }
    if (s.sweep) {
        json values = json::array();
        for (const double v : s.sweep->values) values.push_back(v / std::numbers::pi);
        json sweep = {{"parameter", s.sweep->parameter == SweepParameter::initial_phase
                                        ? "initial_phase"
                                        : "coupling_phase"},
                      {"values_over_pi", values},
                      {"observable_time_ms", s.sweep->observable_time}};
        if (s.sweep->family) {
            sweep["family"] = *s.sweep->family == PlaquetteFamily::fig4_abelian ? "fig4-abelian"
                                                                                : "fig4-nonabelian";
        }
        j["sweep"] = sweep;
    }
    return j.dump(2) + "\n";
}

} // namespace abcage
