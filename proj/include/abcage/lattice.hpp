#pragma once

#include <Eigen/Dense>
#include <string>

#include "abcage/gauge.hpp"

namespace abcage {

/// Angular frequencies are rad/ms, time is ms, hbar = 1 throughout.
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// J = 2pi x 2.5 kHz expressed in rad/ms.
inline constexpr double kDefaultJ = kTwoPi * 2.5;

/// 220 Hz detuning surrogate for magnetic jitter, in rad/ms.
inline constexpr double kDefaultDetuning = kTwoPi * 0.22;

enum class Manifold : int { A = 0, B = 1, C = 2 };
enum class SpinState : int { down = 0, up = 1 };

/// One lattice site: manifold, spin, phonon number.
struct SiteIndex {
    Manifold manifold = Manifold::A;
    SpinState spin = SpinState::down;
    int phonon = 0;

    bool operator==(const SiteIndex&) const = default;
};

/// Where the constant detuning enters the diagonal.
enum class DetuningPlacement {
    d_manifold,   ///< delta on every D_{5/2}-encoded site (manifolds B and C)
    sigma_z_half, ///< +delta/2 on B,C and -delta/2 on A
};

struct LatticeConfig {
    double J = kDefaultJ; ///< coupling strength, rad/ms
    int cutoff = 8;       ///< phonon cutoff N; basis dimension is 6(N+1)
    Plaquette plaquette{UnitaryLink::identity(), UnitaryLink::identity(),
                        UnitaryLink::identity(), UnitaryLink::identity()};
    /// false keeps the sqrt(n+1) sideband factor of the trapped-ion coupling;
    /// true replaces it by 1.
    bool translational_invariant = false;
    double detuning = 0.0; ///< rad/ms, folded into the diagonal when nonzero
    DetuningPlacement detuning_placement = DetuningPlacement::d_manifold;

    int dimension() const { return 6 * (cutoff + 1); }
    void validate() const; ///< throws std::invalid_argument on J <= 0 or N < 1
};

/// Basis ordering is phonon-major, then manifold (A,B,C), then spin (down,up):
/// index = 6n + 2*manifold + spin. (A,down,0) is 0 and (C,up,N) is 6(N+1)-1.
int site_index(const SiteIndex& s, const LatticeConfig& config);
SiteIndex index_to_site(int index, const LatticeConfig& config);

/// Column label used in CSV output, e.g. "A_dn_0".
std::string site_label(const SiteIndex& s);

/// Rhombic-lattice Hamiltonian on the truncated 6(N+1)-dimensional space:
///   H = (J/2) sum_n [ b_n^ U1 a_n + c_n^ U3 a_n
///                     + f(n) a_{n+1}^ U2 b_n + f(n) a_{n+1}^ U4 c_n ] + h.c.
/// with f(n) = sqrt(n+1) unless translational_invariant. Sideband terms that
/// would create phonon N+1 are dropped (hard wall). Includes config.detuning.
Eigen::MatrixXcd build_hamiltonian(const LatticeConfig& config);

/// Adds the constant detuning to a Hamiltonian's diagonal. delta = 0 is the
/// identity. Hermiticity is preserved by construction.
Eigen::MatrixXcd add_detuning(const Eigen::MatrixXcd& H, double delta,
                              DetuningPlacement placement = DetuningPlacement::d_manifold);

/// Plain-text export: "rows cols" header then row-major "re,im" pairs.
void write_matrix_txt(const std::string& path, const Eigen::MatrixXcd& m);

} // namespace abcage
