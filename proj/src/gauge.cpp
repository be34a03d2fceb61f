#include "abcage/gauge.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace abcage {

UnitaryLink::UnitaryLink(const Matrix2& entries, double tol) : m_(entries) {
    const Matrix2 dev = entries.adjoint() * entries - Matrix2::Identity();
    const double err = dev.norm();
    if (!(err < tol)) {
        std::ostringstream msg;
        msg << "link matrix is not unitary: ||U^ U - I||_F = " << err;
        throw std::invalid_argument(msg.str());
    }
}

UnitaryLink UnitaryLink::identity() {
    return UnitaryLink(Matrix2::Identity());
}

UnitaryLink UnitaryLink::spin_flip() {
    Matrix2 m;
    m << 0, 1, 1, 0;
    return UnitaryLink(m);
}

UnitaryLink UnitaryLink::phase_diag(double phi_down, double phi_up) {
    Matrix2 m = Matrix2::Zero();
    m(0, 0) = std::polar(1.0, phi_down);
    m(1, 1) = std::polar(1.0, phi_up);
    return UnitaryLink(m);
}

Matrix2 loop_product(const Plaquette& p, LoopOrdering ordering) {
    const Matrix2& u1 = p.u1.matrix();
    const Matrix2& u2 = p.u2.matrix();
    const Matrix2& u3 = p.u3.matrix();
    const Matrix2& u4 = p.u4.matrix();
    switch (ordering) {
    case LoopOrdering::main_text:
        return u3 * u4 * u2 * u1;
    case LoopOrdering::holonomy:
        return u3.adjoint() * u4.adjoint() * u2 * u1;
    }
    throw std::logic_error("unknown loop ordering");
}

double wilson_loop(const Plaquette& p, LoopOrdering ordering) {
    return std::abs(loop_product(p, ordering).trace());
}

Matrix2 interference_matrix(const Plaquette& p) {
    return 0.5 * (p.u2.matrix() * p.u1.matrix() + p.u4.matrix() * p.u3.matrix());
}

std::optional<int> caging_order(const Matrix2& T, const Spinor& psi, Direction direction,
                                int max_order, double tol) {
    if (max_order < 1) throw std::invalid_argument("max_order must be >= 1");
    if (!(tol > 0)) throw std::invalid_argument("tol must be positive");
    const Matrix2 hop = (direction == Direction::rightward) ? T : Matrix2(T.adjoint());
    Spinor v = psi;
    for (int m = 1; m <= max_order; ++m) {
        v = hop * v;
        if (v.norm() < tol) return m;
    }
    return std::nullopt;
}

PlaquetteClass classify_plaquette(const Plaquette& p, double tol, LoopOrdering ordering) {
    if (!(tol > 0)) throw std::invalid_argument("tol must be positive");
    PlaquetteClass out;
    const Matrix2 loop = loop_product(p, ordering);
    const Complex half_trace = loop.trace() / 2.0;
    out.abelian = std::abs(2.0 - std::abs(loop.trace())) < tol;
    if (out.abelian) {
        const double theta = std::arg(half_trace);
        out.theta = theta;
        // circular distance to pi; arg() wraps values just above pi to near -pi
        const double dist = std::abs(std::remainder(theta - std::numbers::pi, 2.0 * std::numbers::pi));
        out.state_independent_caging = dist < tol;
    }
    return out;
}

Spinor spinor_relative_phase(double phi) {
    Spinor s;
    s << std::polar(1.0 / std::numbers::sqrt2, phi), 1.0 / std::numbers::sqrt2;
    return s;
}

Spinor spinor_out_of_phase() {
    Spinor s;
    s << -1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2;
    return s;
}

Spinor spinor_in_phase() {
    Spinor s;
    s << 1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2;
    return s;
}

Spinor spinor_down() {
    Spinor s;
    s << 1.0, 0.0;
    return s;
}

} // namespace abcage
