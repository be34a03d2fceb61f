#include "abcage/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "abcage/errors.hpp"

namespace abcage {

void NoiseModel::validate() const {
    if (gamma1 < 0 || gamma2 < 0) throw std::invalid_argument("decoherence rates must be nonnegative");
    if (initial_nbar < 0) throw std::invalid_argument("initial_nbar must be nonnegative");
}

std::vector<double> Trajectory::p0_series() const {
    std::vector<double> out;
    out.reserve(populations.size());
    for (const auto& pops : populations) out.push_back(p0_from_populations(pops));
    return out;
}

double Trajectory::population(std::size_t k, const SiteIndex& site, const LatticeConfig& config) const {
    return populations.at(k).at(static_cast<std::size_t>(site_index(site, config)));
}

namespace {

void check_times(const std::vector<double>& times) {
    if (times.empty()) throw std::invalid_argument("times must be nonempty");
    if (times.front() < 0) throw std::invalid_argument("times must be nonnegative");
    if (!std::is_sorted(times.begin(), times.end()))
        throw std::invalid_argument("times must be sorted ascending");
}

void check_hermitian(const Eigen::MatrixXcd& H) {
    const double scale = std::max(1.0, H.norm());
    if ((H - H.adjoint()).norm() > 1e-12 * scale)
        throw std::invalid_argument("Hamiltonian is not Hermitian");
}

void check_normalized_spinor(const Spinor& s) {
    if (std::abs(s.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("initial spinor must be normalized");
}

} // namespace

Eigen::VectorXcd prepare_state(Manifold manifold, int phonon, const Spinor& spinor,
                               const LatticeConfig& config) {
    check_normalized_spinor(spinor);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(config.dimension());
    psi(site_index({manifold, SpinState::down, phonon}, config)) = spinor(0);
    psi(site_index({manifold, SpinState::up, phonon}, config)) = spinor(1);
    return psi;
}

Eigen::MatrixXcd prepare_thermal_state(Manifold manifold, int phonon, const Spinor& spinor,
                                       double nbar, const LatticeConfig& config) {
    check_normalized_spinor(spinor);
    if (nbar < 0) throw std::invalid_argument("nbar must be nonnegative");
    if (phonon < 0 || phonon > config.cutoff)
        throw std::out_of_range("preparation phonon outside cutoff");
    const int dim = config.dimension();
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    // geometric weights nbar^k / (1+nbar)^(k+1) on the residual excitation,
    // renormalized over the levels that fit below the cutoff
    const int levels = config.cutoff - phonon + 1;
    std::vector<double> w(levels);
    double total = 0.0;
    const double ratio = (nbar > 0) ? nbar / (1.0 + nbar) : 0.0;
    double term = 1.0;
    for (int k = 0; k < levels; ++k) {
        w[k] = term;
        total += term;
        term *= ratio;
    }
    for (int k = 0; k < levels; ++k) {
        const Eigen::VectorXcd basis = prepare_state(manifold, phonon + k, spinor, config);
        rho.noalias() += (w[k] / total) * basis * basis.adjoint();
    }
    return rho;
}

Trajectory evolve_unitary(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& psi0,
                          const std::vector<double>& times) {
    check_times(times);
    check_hermitian(H);
    if (std::abs(psi0.norm() - 1.0) > 1e-10)
        throw std::invalid_argument("initial state must be normalized");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(H);
    if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
    const Eigen::MatrixXcd& V = eig.eigenvectors();
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    const Eigen::VectorXcd modal = V.adjoint() * psi0;

    Trajectory traj;
    traj.times = times;
    traj.states.reserve(times.size());
    traj.populations.reserve(times.size());
    for (const double t : times) {
        Eigen::VectorXcd phase(lambda.size());
        for (Eigen::Index k = 0; k < lambda.size(); ++k)
            phase(k) = std::polar(1.0, -lambda(k) * t);
        const Eigen::VectorXcd psi = V * phase.cwiseProduct(modal).matrix();
        if (std::abs(psi.norm() - 1.0) > 1e-10)
            throw NumericalError("norm drift in unitary propagation");
        traj.states.push_back(psi);
        traj.populations.push_back(site_populations(psi));
    }
    return traj;
}

void validate_density_matrix(const Eigen::MatrixXcd& rho) {
    if (rho.rows() != rho.cols()) throw std::invalid_argument("density matrix must be square");
    if ((rho - rho.adjoint()).norm() > 1e-10 * std::max(1.0, rho.norm()))
        throw std::invalid_argument("density matrix must be Hermitian");
    if (std::abs(rho.trace().real() - 1.0) > 1e-8 || std::abs(rho.trace().imag()) > 1e-8)
        throw std::invalid_argument("density matrix must have unit trace");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-8)
        throw std::invalid_argument("density matrix must be positive semidefinite");
}

namespace {

// Lindblad generator with the structure of the three collapse operators baked
// in: the anticommutator half is folded into G = iH' + K (K diagonal), the
// jump terms are O(dim^2) shifted/masked copies.
class LindbladGenerator {
public:
    LindbladGenerator(const Eigen::MatrixXcd& H_eff, const NoiseModel& noise, int dim)
        : gamma1_(noise.gamma1), gamma2_(noise.gamma2), dim_(dim) {
        Eigen::VectorXd kdiag(dim);
        zsign_.resize(dim);
        sqrt_n_.resize(dim);
        for (int i = 0; i < dim; ++i) {
            const int n = i / 6;
            const bool top = i + 6 >= dim;
            kdiag(i) = 0.5 * (gamma1_ * ((top ? 0.0 : n + 1.0) + n) + gamma2_);
            zsign_[i] = ((i % 6) / 2 == 0) ? -1.0 : 1.0; // A sites are S_{1/2}
            sqrt_n_[i] = std::sqrt(double(n));
        }
        G_ = Eigen::MatrixXcd(Complex(0, 1) * H_eff);
        G_.diagonal() += kdiag.cast<Complex>();
        G_adj_ = G_.adjoint();
    }

    void operator()(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const {
        out.noalias() = -(G_ * rho);
        out.noalias() -= rho * G_adj_;
        for (int j = 0; j < dim_; ++j) {
            for (int i = 0; i < dim_; ++i) {
                Complex jump = gamma2_ * zsign_[i] * zsign_[j] * rho(i, j);
                if (i >= 6 && j >= 6) // heating sqrt(G1) a^
                    jump += gamma1_ * sqrt_n_[i] * sqrt_n_[j] * rho(i - 6, j - 6);
                if (i + 6 < dim_ && j + 6 < dim_) // damping sqrt(G1) a
                    jump += gamma1_ * sqrt_n_[i + 6] * sqrt_n_[j + 6] * rho(i + 6, j + 6);
                out(i, j) += jump;
            }
        }
    }

private:
    double gamma1_, gamma2_;
    int dim_;
    Eigen::MatrixXcd G_, G_adj_;
    std::vector<double> zsign_, sqrt_n_;
};

} // namespace

Trajectory evolve_lindblad(const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& rho0,
                           const NoiseModel& noise, const std::vector<double>& times,
                           const LatticeConfig& config, const LindbladOptions& options) {
    check_times(times);
    check_hermitian(H);
    noise.validate();
    validate_density_matrix(rho0);
    const int dim = config.dimension();
    if (H.rows() != dim || rho0.rows() != dim)
        throw std::invalid_argument("operator dimensions do not match the lattice");

    const Eigen::MatrixXcd H_eff = add_detuning(H, noise.detuning, config.detuning_placement);
    const LindbladGenerator rhs(H_eff, noise, dim);

    // Dormand-Prince 5(4) tableau
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    Trajectory traj;
    traj.times = times;
    traj.open_system = true;
    traj.min_eigenvalue = 0.0;

    Eigen::MatrixXcd y = rho0;
    Eigen::MatrixXcd k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim), k5(dim, dim),
        k6(dim, dim), k7(dim, dim), ytmp(dim, dim), ynew(dim, dim), err(dim, dim);

    double t = times.front();
    double dt = 1e-3;
    rhs(y, k1);
    bool k1_fresh = true;

    auto record = [&](const Eigen::MatrixXcd& rho) {
        traj.max_trace_drift = std::max(traj.max_trace_drift, std::abs(rho.trace() - Complex(1.0)));
        traj.max_hermiticity_drift =
            std::max(traj.max_hermiticity_drift, (rho - rho.adjoint()).norm());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho, Eigen::EigenvaluesOnly);
        traj.min_eigenvalue = std::min(traj.min_eigenvalue, eig.eigenvalues().minCoeff());
        if (options.store_states) traj.density_matrices.push_back(rho);
        traj.populations.push_back(site_populations(rho));
    };

    std::size_t next_output = 0;
    while (next_output < times.size() && times[next_output] <= t + 1e-15) {
        record(y);
        ++next_output;
    }

    while (next_output < times.size()) {
        const double t_target = times[next_output];
        bool output_step = false;
        double h = dt;
        if (t + h >= t_target) {
            h = t_target - t;
            output_step = true;
        }

        if (!k1_fresh) {
            rhs(y, k1);
            k1_fresh = true;
        }
        ytmp = y + h * (a21 * k1);
        rhs(ytmp, k2);
        ytmp = y + h * (a31 * k1 + a32 * k2);
        rhs(ytmp, k3);
        ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(ytmp, k4);
        ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(ytmp, k5);
        ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(ytmp, k6);
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        rhs(ynew, k7);
        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const double scale =
            options.abs_tol + options.rel_tol * std::max(y.cwiseAbs().maxCoeff(), ynew.cwiseAbs().maxCoeff());
        const double err_norm = err.cwiseAbs().maxCoeff() / scale;

        if (err_norm <= 1.0) {
            t += h;
            y.swap(ynew);
            k1 = k7; // first-same-as-last
            k1_fresh = true;
            if (output_step) {
                record(y);
                ++next_output;
            }
        } else {
            k1_fresh = true; // k1 still matches y
        }

        const double factor = (err_norm > 0) ? 0.9 * std::pow(err_norm, -0.2) : 5.0;
        dt = h * std::clamp(factor, 0.2, 5.0);
        if (dt < options.min_step) {
            std::ostringstream msg;
            msg << "Lindblad integrator step underflow at t=" << t << " ms (step " << dt << ")";
            throw NumericalError(msg.str());
        }
    }
    return traj;
}

std::vector<double> site_populations(const Eigen::VectorXcd& state) {
    std::vector<double> pops(static_cast<std::size_t>(state.size()));
    for (Eigen::Index i = 0; i < state.size(); ++i) pops[i] = std::norm(state(i));
    return pops;
}

std::vector<double> site_populations(const Eigen::MatrixXcd& rho) {
    std::vector<double> pops(static_cast<std::size_t>(rho.rows()));
    for (Eigen::Index i = 0; i < rho.rows(); ++i) pops[i] = rho(i, i).real();
    return pops;
}

double p0_from_populations(const std::vector<double>& populations) {
    double total = 0.0;
    for (int i = 0; i < 6 && i < static_cast<int>(populations.size()); ++i) total += populations[i];
    return total;
}

double p0(const Eigen::VectorXcd& state) { return p0_from_populations(site_populations(state)); }
double p0(const Eigen::MatrixXcd& rho) { return p0_from_populations(site_populations(rho)); }

Eigen::MatrixXcd build_link_hamiltonian(const LatticeConfig& config, int link) {
    config.validate();
    if (link < 1 || link > 4) throw std::invalid_argument("link must be in 1..4");
    const int dim = config.dimension();
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);
    const double half_J = 0.5 * config.J;
    for (int n = 0; n <= config.cutoff; ++n) {
        const double f = config.translational_invariant ? 1.0 : std::sqrt(double(n + 1));
        for (int rs = 0; rs < 2; ++rs) {
            for (int cs = 0; cs < 2; ++cs) {
                Complex v;
                int row = -1, col = -1;
                switch (link) {
                case 1:
                    v = half_J * config.plaquette.u1.matrix()(rs, cs);
                    row = site_index({Manifold::B, static_cast<SpinState>(rs), n}, config);
                    col = site_index({Manifold::A, static_cast<SpinState>(cs), n}, config);
                    break;
                case 3:
                    v = half_J * config.plaquette.u3.matrix()(rs, cs);
                    row = site_index({Manifold::C, static_cast<SpinState>(rs), n}, config);
                    col = site_index({Manifold::A, static_cast<SpinState>(cs), n}, config);
                    break;
                case 2:
                    if (n + 1 > config.cutoff) continue;
                    v = half_J * f * config.plaquette.u2.matrix()(rs, cs);
                    row = site_index({Manifold::A, static_cast<SpinState>(rs), n + 1}, config);
                    col = site_index({Manifold::B, static_cast<SpinState>(cs), n}, config);
                    break;
                case 4:
                    if (n + 1 > config.cutoff) continue;
                    v = half_J * f * config.plaquette.u4.matrix()(rs, cs);
                    row = site_index({Manifold::A, static_cast<SpinState>(rs), n + 1}, config);
                    col = site_index({Manifold::C, static_cast<SpinState>(cs), n}, config);
                    break;
                }
                if (v == Complex(0.0, 0.0)) continue;
                H(row, col) += v;
                H(col, row) += std::conj(v);
            }
        }
    }
    return H;
}

namespace {

// Final A-manifold 2x2 spin block, traced over the phonon register.
Matrix2 a_manifold_spin_block(const Eigen::MatrixXcd& rho, const LatticeConfig& config) {
    Matrix2 block = Matrix2::Zero();
    for (int n = 0; n <= config.cutoff; ++n) {
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) {
                const int row = site_index({Manifold::A, static_cast<SpinState>(j), n}, config);
                const int col = site_index({Manifold::A, static_cast<SpinState>(k), n}, config);
                block(j, k) += rho(row, col);
            }
        }
    }
    return block;
}

// Dominant column of a (nearly) rank-one positive block, scaled to sqrt of
// its leading eigenvalue. Phase is arbitrary at this stage.
Spinor dominant_column(const Matrix2& block) {
    const Matrix2 herm = 0.5 * (block + block.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix2> eig(herm);
    const double lead = std::max(eig.eigenvalues()(1), 0.0);
    return std::sqrt(lead) * eig.eigenvectors().col(1);
}

} // namespace

double wilson_loop_protocol(const Plaquette& p, const LatticeConfig& config,
                            const std::optional<NoiseModel>& noise) {
    LatticeConfig run = config;
    run.plaquette = p;
    run.validate();
    const double t_pi = std::numbers::pi / run.J;
    const int pulse_order[4] = {1, 2, 4, 3}; // traversal A0 -> B0 -> A1 -> C0 -> A0

    std::array<Eigen::MatrixXcd, 4> pulse_H;
    for (int k = 0; k < 4; ++k) pulse_H[k] = build_link_hamiltonian(run, pulse_order[k]);

    Spinor plus_i;
    plus_i << 1.0 / std::numbers::sqrt2, Complex(0.0, 1.0 / std::numbers::sqrt2);
    const std::array<Spinor, 4> preparations = {spinor_down(), Spinor(Spinor::Unit(1)),
                                                spinor_in_phase(), plus_i};

    std::array<Matrix2, 4> blocks;
    const std::vector<double> pulse_times = {0.0, t_pi};
    for (std::size_t prep = 0; prep < preparations.size(); ++prep) {
        if (noise) {
            Eigen::MatrixXcd rho =
                prepare_thermal_state(Manifold::A, 0, preparations[prep], noise->initial_nbar, run);
            for (int k = 0; k < 4; ++k) {
                Trajectory seg = evolve_lindblad(pulse_H[k], rho, *noise, pulse_times, run);
                rho = seg.density_matrices.back();
            }
            blocks[prep] = a_manifold_spin_block(rho, run);
        } else {
            Eigen::VectorXcd psi = prepare_state(Manifold::A, 0, preparations[prep], run);
            for (int k = 0; k < 4; ++k) {
                Trajectory seg = evolve_unitary(pulse_H[k], psi, pulse_times);
                psi = seg.states.back();
            }
            const Eigen::MatrixXcd rho = psi * psi.adjoint();
            blocks[prep] = a_manifold_spin_block(rho, run);
        }
    }

    // columns of the loop map from the basis preparations, relative phase from
    // the superposition preparations: with m1 = M e0 and m2 = M e1,
    //   2 B3 - B1 - B2 = m1 m2^ + m2 m1^ and 2 B4 - B1 - B2 = i(m2 m1^ - m1 m2^),
    // so G = m1 m2^ follows and fixes arg between the columns.
    Spinor m1 = dominant_column(blocks[0]);
    Spinor m2 = dominant_column(blocks[1]);
    const Matrix2 X = 2.0 * blocks[2] - blocks[0] - blocks[1];
    const Matrix2 Y = 2.0 * blocks[3] - blocks[0] - blocks[1];
    const Matrix2 G = 0.5 * (X + Complex(0, 1) * Y);
    if (m1.norm() > 1e-9 && m2.norm() > 1e-9) {
        const Complex overlap = (m1.adjoint() * G * m2)(0);
        if (std::abs(overlap) > 1e-12) m2 *= std::polar(1.0, -std::arg(overlap));
    }
    return std::abs(m1(0) + m2(1));
}

} // namespace abcage
