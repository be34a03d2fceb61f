#include "abcage/lattice.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace abcage {

void LatticeConfig::validate() const {
    if (!(J > 0)) throw std::invalid_argument("coupling strength J must be positive");
    if (cutoff < 1) throw std::invalid_argument("phonon cutoff N must be at least 1");
}

int site_index(const SiteIndex& s, const LatticeConfig& config) {
    if (s.phonon < 0 || s.phonon > config.cutoff) {
        std::ostringstream msg;
        msg << "phonon number " << s.phonon << " outside cutoff [0, " << config.cutoff << "]";
        throw std::out_of_range(msg.str());
    }
    return 6 * s.phonon + 2 * static_cast<int>(s.manifold) + static_cast<int>(s.spin);
}

SiteIndex index_to_site(int index, const LatticeConfig& config) {
    if (index < 0 || index >= config.dimension()) {
        throw std::out_of_range("basis index outside the truncated space");
    }
    SiteIndex s;
    s.phonon = index / 6;
    s.manifold = static_cast<Manifold>((index % 6) / 2);
    s.spin = static_cast<SpinState>(index % 2);
    return s;
}

std::string site_label(const SiteIndex& s) {
    static const char* manifold_names[] = {"A", "B", "C"};
    std::string label = manifold_names[static_cast<int>(s.manifold)];
    label += (s.spin == SpinState::down) ? "_dn_" : "_up_";
    label += std::to_string(s.phonon);
    return label;
}

namespace {

// Writes (J/2) * U into the block coupling source manifold/phonon to target,
// plus the Hermitian conjugate block.
void add_coupling(Eigen::MatrixXcd& H, const LatticeConfig& config, Manifold target,
                  int target_phonon, Manifold source, int source_phonon, const Matrix2& U,
                  double scale) {
    for (int row_spin = 0; row_spin < 2; ++row_spin) {
        for (int col_spin = 0; col_spin < 2; ++col_spin) {
            const Complex value = scale * U(row_spin, col_spin);
            if (value == Complex(0.0, 0.0)) continue;
            const int row = site_index({target, static_cast<SpinState>(row_spin), target_phonon}, config);
            const int col = site_index({source, static_cast<SpinState>(col_spin), source_phonon}, config);
            H(row, col) += value;
            H(col, row) += std::conj(value);
        }
    }
}

} // namespace

Eigen::MatrixXcd build_hamiltonian(const LatticeConfig& config) {
    config.validate();
    const int dim = config.dimension();
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);
    const double half_J = 0.5 * config.J;

    for (int n = 0; n <= config.cutoff; ++n) {
        // carrier links, equal phonon number
        add_coupling(H, config, Manifold::B, n, Manifold::A, n, config.plaquette.u1.matrix(), half_J);
        add_coupling(H, config, Manifold::C, n, Manifold::A, n, config.plaquette.u3.matrix(), half_J);
        // red-sideband links, n -> n+1, dropped at the hard wall
        if (n + 1 <= config.cutoff) {
            const double f = config.translational_invariant ? 1.0 : std::sqrt(double(n + 1));
            add_coupling(H, config, Manifold::A, n + 1, Manifold::B, n, config.plaquette.u2.matrix(), half_J * f);
            add_coupling(H, config, Manifold::A, n + 1, Manifold::C, n, config.plaquette.u4.matrix(), half_J * f);
        }
    }

    if (config.detuning != 0.0) {
        H = add_detuning(H, config.detuning, config.detuning_placement);
    }
    return H;
}

Eigen::MatrixXcd add_detuning(const Eigen::MatrixXcd& H, double delta, DetuningPlacement placement) {
    Eigen::MatrixXcd out = H;
    if (delta == 0.0) return out;
    const int dim = static_cast<int>(H.rows());
    for (int i = 0; i < dim; ++i) {
        const auto manifold = static_cast<Manifold>((i % 6) / 2);
        const bool d_site = manifold != Manifold::A;
        switch (placement) {
        case DetuningPlacement::d_manifold:
            if (d_site) out(i, i) += delta;
            break;
        case DetuningPlacement::sigma_z_half:
            out(i, i) += d_site ? 0.5 * delta : -0.5 * delta;
            break;
        }
    }
    return out;
}

void write_matrix_txt(const std::string& path, const Eigen::MatrixXcd& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << m.rows() << " " << m.cols() << "\n";
    out.precision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << " ";
            out << m(i, j).real() << "," << m(i, j).imag();
        }
        out << "\n";
    }
}

} // namespace abcage
