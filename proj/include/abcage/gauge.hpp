#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>

namespace abcage {

using Complex = std::complex<double>;
using Matrix2 = Eigen::Matrix2cd;
using Spinor = Eigen::Vector2cd;

/// Tolerance for null/caging tests on 2-vectors. Exact algebra at dimension 2
/// leaves only rounding error, so this is deliberately tight.
inline constexpr double kNullTol = 1e-10;

/// Tolerance for the unitarity check at construction (Frobenius norm).
inline constexpr double kUnitarityTol = 1e-12;

/// A 2x2 unitary decorating one lattice bond. General U(2) is admitted:
/// the spin-flip link has determinant -1 and must be representable.
class UnitaryLink {
public:
    /// Throws std::invalid_argument if entries are not unitary within tol.
    explicit UnitaryLink(const Matrix2& entries, double tol = kUnitarityTol);

    static UnitaryLink identity();
    /// [[0,1],[1,0]]
    static UnitaryLink spin_flip();
    /// diag(e^{i phi_down}, e^{i phi_up})
    static UnitaryLink phase_diag(double phi_down, double phi_up);

    const Matrix2& matrix() const { return m_; }

private:
    Matrix2 m_;
};

/// Ordered four-link rhombic cell. u1: A->B, u2: B->A', u3: A->C, u4: C->A'.
struct Plaquette {
    UnitaryLink u1, u2, u3, u4;
};

/// The two published orderings of the loop product. They agree whenever all
/// links are Hermitian (every configuration used in practice) but differ for
/// general links; both are kept and nothing is guessed.
enum class LoopOrdering {
    main_text, ///< |Tr(U3 U4 U2 U1)|
    holonomy,  ///< |Tr(U3^ U4^ U2 U1)|, the form entering the Abelian dichotomy
};

enum class Direction { rightward, leftward };

/// Ordered product of the four links for the requested ordering.
Matrix2 loop_product(const Plaquette& p, LoopOrdering ordering);

/// |Tr| of the loop product; always in [0, 2] for unitary links.
double wilson_loop(const Plaquette& p, LoopOrdering ordering = LoopOrdering::main_text);

/// T = (U2 U1 + U4 U3) / 2, the effective A_n -> A_{n+1} hop. Operator norm
/// is at most 1 (average of two unitaries).
Matrix2 interference_matrix(const Plaquette& p);

/// Smallest m <= max_order with ||T^m psi|| < tol (rightward) or
/// ||(T^)^m psi|| < tol (leftward); nullopt when no such m exists.
std::optional<int> caging_order(const Matrix2& T, const Spinor& psi, Direction direction,
                                int max_order = 10, double tol = kNullTol);

struct PlaquetteClass {
    bool abelian = false;
    /// Phase theta with U2 U1 = e^{i theta} U4 U3, branch (-pi, pi].
    /// Present iff abelian.
    std::optional<double> theta;
    /// theta == pi, i.e. T = 0: first-order caging for every spinor.
    bool state_independent_caging = false;
};

/// Abelian dichotomy: the plaquette is Abelian iff the loop product under
/// `ordering` is proportional to the identity (|Tr| = 2 within tol). Then
/// theta = pi gives T = 0 and state-independent first-order caging, while
/// theta != pi forbids caging for every spinor and every order.
PlaquetteClass classify_plaquette(const Plaquette& p, double tol = kNullTol,
                                  LoopOrdering ordering = LoopOrdering::holonomy);

/// (e^{i phi}, 1)/sqrt(2); phi = pi gives the out-of-phase state.
Spinor spinor_relative_phase(double phi);
/// (-1, 1)/sqrt(2)
Spinor spinor_out_of_phase();
/// (1, 1)/sqrt(2)
Spinor spinor_in_phase();
/// (1, 0)
Spinor spinor_down();

} // namespace abcage
