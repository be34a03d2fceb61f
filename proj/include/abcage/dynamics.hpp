#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "abcage/gauge.hpp"
#include "abcage/lattice.hpp"

namespace abcage {

/// Open-system parameters. Rates are 1/ms, the detuning is rad/ms.
struct NoiseModel {
    double gamma1 = 0.1;                 ///< phonon heating/damping rate (100 Hz)
    double gamma2 = 0.2;                 ///< spin dephasing rate (200 Hz)
    double detuning = kDefaultDetuning;  ///< constant detuning surrogate for magnetic jitter
    double initial_nbar = 0.05;          ///< mean thermal phonon number after cooling

    void validate() const; ///< throws std::invalid_argument on negative rates
};

/// Time series of states and site populations along one evolution.
struct Trajectory {
    std::vector<double> times; ///< ms
    /// Pure-state path: one normalized vector per time. Empty for open runs.
    std::vector<Eigen::VectorXcd> states;
    /// Open-system path: one density matrix per time. Empty for unitary runs.
    std::vector<Eigen::MatrixXcd> density_matrices;
    /// Basis-ordered site populations at each time.
    std::vector<std::vector<double>> populations;

    // integrator diagnostics, populated by evolve_lindblad
    double max_trace_drift = 0.0;
    double max_hermiticity_drift = 0.0;
    double min_eigenvalue = 0.0;

    bool open_system = false;

    /// Sum of the six n = 0 populations at each time.
    std::vector<double> p0_series() const;
    /// Population of one site at time index k.
    double population(std::size_t k, const SiteIndex& site, const LatticeConfig& config) const;
};

struct LindbladOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    double min_step = 1e-10; ///< ms; stepping below this raises NumericalError
    bool store_states = true;
};

/// Places the spinor components on (manifold, down, n) and (manifold, up, n).
/// The spinor must be normalized; phonon must respect the cutoff.
Eigen::VectorXcd prepare_state(Manifold manifold, int phonon, const Spinor& spinor,
                               const LatticeConfig& config);

/// Thermal phonon distribution with mean nbar (truncated at N and
/// renormalized) stacked on top of the target phonon number and tensored
/// with the spin state on one manifold. nbar = 0 reduces to the pure
/// preparation at `phonon`.
Eigen::MatrixXcd prepare_thermal_state(Manifold manifold, int phonon, const Spinor& spinor,
                                       double nbar, const LatticeConfig& config);

/// Exact propagation of a time-independent Hermitian H by spectral
/// decomposition. times must be sorted and nonnegative; psi0 normalized.
Trajectory evolve_unitary(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& psi0,
                          const std::vector<double>& times);

/// Lindblad master equation
///   drho/dt = -i[H', rho] + sum_j ( C_j rho C_j^ - {C_j^ C_j, rho}/2 )
/// with collapse operators sqrt(G1) a^, sqrt(G1) a (phonon factor tensored
/// with spin identity) and sqrt(G2) sigma_z (D-manifold projector minus
/// S-manifold projector tensored with phonon identity). The noise detuning is
/// folded into H' = add_detuning(H, noise.detuning, config.detuning_placement).
/// Integrated by adaptive Dormand-Prince RK5(4); the trace is never silently
/// renormalized, drifts are recorded in the trajectory diagnostics.
Trajectory evolve_lindblad(const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& rho0,
                           const NoiseModel& noise, const std::vector<double>& times,
                           const LatticeConfig& config, const LindbladOptions& options = {});

/// |amplitude|^2 per basis state (pure) or real diagonal (density matrix).
std::vector<double> site_populations(const Eigen::VectorXcd& state);
std::vector<double> site_populations(const Eigen::MatrixXcd& rho);

/// Sum of the populations of all n = 0 sites.
double p0(const Eigen::VectorXcd& state);
double p0(const Eigen::MatrixXcd& rho);
double p0_from_populations(const std::vector<double>& populations);

/// Hamiltonian with only one link's couplings turned on (link in 1..4),
/// summed over all phonon rungs exactly as in build_hamiltonian.
Eigen::MatrixXcd build_link_hamiltonian(const LatticeConfig& config, int link);

/// Sequential pi-pulse measurement of the Wilson loop: starting from A_0 the
/// couplings U1, U2, U4, U3 are turned on one at a time for t_pi = pi/J,
/// traversing the plaquette A_0 -> B_0 -> A_1 -> C_0 -> A_0. Four spin
/// preparations fix the effective 2x2 loop map from the final A-manifold spin
/// block; the return value is |trace| of that map. Without noise this equals
/// the holonomy-ordering wilson_loop. With a noise model each pulse is a
/// Lindblad segment and the initial phonon state is thermal at initial_nbar.
double wilson_loop_protocol(const Plaquette& p, const LatticeConfig& config,
                            const std::optional<NoiseModel>& noise = std::nullopt);

/// Checks the DensityMatrix invariants (Hermitian, unit trace, eigenvalues
/// bounded below by -1e-8); throws std::invalid_argument on violation.
void validate_density_matrix(const Eigen::MatrixXcd& rho);

} // namespace abcage
