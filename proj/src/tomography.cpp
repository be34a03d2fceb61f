#include "abcage/tomography.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "abcage/errors.hpp"

namespace abcage {

void SidebandModelParams::validate() const {
    if (!(omega > 0)) throw std::invalid_argument("omega must be positive");
    if (!(eta > 0) || !(eta < 1)) throw std::invalid_argument("eta must lie in (0, 1)");
    if (n_max < 1) throw std::invalid_argument("n_max must be at least 1");
}

void PhononDistribution::validate() const {
    double sum = 0.0;
    for (const double v : p) {
        if (v < 0.0 || v > 1.0) throw std::invalid_argument("phonon populations must lie in [0, 1]");
        sum += v;
    }
    if (sum > 1.0 + 1e-9) throw std::invalid_argument("phonon populations must sum to at most 1");
}

double PhononDistribution::total() const {
    double sum = 0.0;
    for (const double v : p) sum += v;
    return sum;
}

void SidebandDataset::validate() const {
    if (times.size() != bright_probability.size())
        throw std::invalid_argument("dataset columns must have equal length");
    if (shots < 1) throw std::invalid_argument("shots must be at least 1");
    for (const double b : bright_probability) {
        if (b < 0.0 || b > 1.0) throw std::invalid_argument("bright probabilities must lie in [0, 1]");
    }
}

double laguerre_gen(int n, int alpha, double x) {
    if (n < 0) throw std::invalid_argument("Laguerre degree must be nonnegative");
    if (n == 0) return 1.0;
    double prev = 1.0;
    double curr = 1.0 + alpha - x;
    for (int k = 2; k <= n; ++k) {
        const double next = ((2.0 * k - 1.0 + alpha - x) * curr - (k - 1.0 + alpha) * prev) / k;
        prev = curr;
        curr = next;
    }
    return curr;
}

double sideband_frequency(int n, const SidebandModelParams& params) {
    const double eta2 = params.eta * params.eta;
    return params.omega * (std::exp(-eta2 / 2.0) / std::sqrt(n + 1.0)) * params.eta *
           laguerre_gen(n, 1, eta2);
}

std::vector<double> sideband_signal(const PhononDistribution& dist,
                                    const SidebandModelParams& params,
                                    const std::vector<double>& times) {
    params.validate();
    dist.validate();
    std::vector<double> freq(dist.p.size());
    for (std::size_t n = 0; n < dist.p.size(); ++n)
        freq[n] = sideband_frequency(static_cast<int>(n), params);

    std::vector<double> out;
    out.reserve(times.size());
    for (const double t : times) {
        double value = 0.0;
        for (std::size_t n = 0; n < dist.p.size(); ++n)
            value += 0.5 * dist.p[n] * (1.0 + std::cos(freq[n] * t));
        out.push_back(value);
    }
    return out;
}

SidebandDataset synthesize_sideband_data(const PhononDistribution& dist,
                                         const SidebandModelParams& params,
                                         const std::vector<double>& times, int shots,
                                         std::uint64_t seed) {
    if (shots < 1) throw std::invalid_argument("shots must be at least 1");
    const std::vector<double> ideal = sideband_signal(dist, params, times);
    std::mt19937_64 rng(seed);
    SidebandDataset data;
    data.times = times;
    data.shots = shots;
    data.bright_probability.reserve(times.size());
    for (const double p : ideal) {
        const double clamped = std::clamp(p, 0.0, 1.0);
        std::binomial_distribution<int> draw(shots, clamped);
        data.bright_probability.push_back(static_cast<double>(draw(rng)) / shots);
    }
    return data;
}

namespace {

// Lawson-Hanson active-set non-negative least squares. The problem is convex,
// so the passive-set solution it terminates with is the global minimizer.
Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    const int cols = static_cast<int>(A.cols());
    Eigen::VectorXd x = Eigen::VectorXd::Zero(cols);
    std::vector<bool> passive(cols, false);
    Eigen::VectorXd w = A.transpose() * (b - A * x);

    const double tol = 1e-12 * A.norm() * std::max(1.0, b.norm());
    const int max_outer = 3 * cols + 30;
    for (int outer = 0; outer < max_outer; ++outer) {
        int best = -1;
        double best_w = tol;
        for (int j = 0; j < cols; ++j) {
            if (!passive[j] && w(j) > best_w) {
                best = j;
                best_w = w(j);
            }
        }
        if (best < 0) return x; // KKT satisfied
        passive[best] = true;

        for (int inner = 0; inner < max_outer; ++inner) {
            std::vector<int> idx;
            for (int j = 0; j < cols; ++j)
                if (passive[j]) idx.push_back(j);
            Eigen::MatrixXd Ap(A.rows(), idx.size());
            for (std::size_t k = 0; k < idx.size(); ++k) Ap.col(k) = A.col(idx[k]);
            const Eigen::VectorXd z = Ap.colPivHouseholderQr().solve(b);

            double alpha = 1.0;
            for (std::size_t k = 0; k < idx.size(); ++k) {
                if (z(k) <= 0.0) {
                    const double xi = x(idx[k]);
                    const double step = xi / (xi - z(k));
                    alpha = std::min(alpha, step);
                }
            }
            if (alpha >= 1.0) {
                x.setZero();
                for (std::size_t k = 0; k < idx.size(); ++k) x(idx[k]) = z(k);
                break;
            }
            for (std::size_t k = 0; k < idx.size(); ++k) {
                const int j = idx[k];
                x(j) += alpha * (z(k) - x(j));
                if (x(j) <= std::numeric_limits<double>::epsilon()) {
                    x(j) = 0.0;
                    passive[j] = false;
                }
            }
        }
        w = A.transpose() * (b - A * x);
    }
    throw NumericalError("non-negative least squares did not converge");
}

} // namespace

PhononFit fit_phonon_populations(const SidebandDataset& data, const SidebandModelParams& params) {
    params.validate();
    data.validate();
    const int bins = params.n_max + 1;
    const int m = static_cast<int>(data.times.size());
    if (m < bins + 1)
        throw std::invalid_argument("dataset must have at least n_max + 2 points");

    Eigen::MatrixXd A(m, bins);
    for (int n = 0; n < bins; ++n) {
        const double freq = sideband_frequency(n, params);
        for (int i = 0; i < m; ++i) A(i, n) = 0.5 * (1.0 + std::cos(freq * data.times[i]));
    }
    Eigen::VectorXd y(m);
    for (int i = 0; i < m; ++i) y(i) = data.bright_probability[i];

    // simplex inequality sum p <= 1 via a slack bin and one heavily weighted
    // equality row: the slack absorbs unassigned tail mass exactly, so the
    // augmented optimum coincides with the constrained optimum
    const double weight = 1e6;
    Eigen::MatrixXd A_aug(m + 1, bins + 1);
    A_aug.setZero();
    A_aug.topLeftCorner(m, bins) = A;
    A_aug.row(m).setConstant(weight);
    Eigen::VectorXd y_aug(m + 1);
    y_aug.head(m) = y;
    y_aug(m) = weight;

    const Eigen::VectorXd solution = nnls(A_aug, y_aug).head(bins);

    PhononFit fit;
    fit.distribution.p.assign(solution.data(), solution.data() + bins);
    for (double& v : fit.distribution.p) v = std::min(v, 1.0);

    const Eigen::VectorXd residual = y - A * solution;
    fit.residual_norm = residual.norm();

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const double s_min = svd.singularValues()(svd.singularValues().size() - 1);
    fit.condition_number = (s_min > 0) ? svd.singularValues()(0) / s_min
                                       : std::numeric_limits<double>::infinity();
    fit.conditioning_warning = fit.condition_number > 1e8;

    // covariance of the free bins; pinned bins get the single-column bound
    std::vector<int> free_bins;
    for (int n = 0; n < bins; ++n)
        if (solution(n) > 0.0) free_bins.push_back(n);
    const int dof = std::max(1, m - static_cast<int>(free_bins.size()));
    const double sigma2 = residual.squaredNorm() / dof;

    fit.uncertainty.assign(bins, 0.0);
    fit.one_sided.assign(bins, false);
    if (!free_bins.empty()) {
        Eigen::MatrixXd Af(m, free_bins.size());
        for (std::size_t k = 0; k < free_bins.size(); ++k) Af.col(k) = A.col(free_bins[k]);
        const Eigen::MatrixXd cov =
            sigma2 * (Af.transpose() * Af).completeOrthogonalDecomposition().pseudoInverse();
        for (std::size_t k = 0; k < free_bins.size(); ++k)
            fit.uncertainty[free_bins[k]] = std::sqrt(std::max(cov(k, k), 0.0));
    }
    for (int n = 0; n < bins; ++n) {
        if (solution(n) <= 0.0) {
            fit.one_sided[n] = true;
            fit.uncertainty[n] = std::sqrt(sigma2 / A.col(n).squaredNorm());
        }
    }
    return fit;
}

} // namespace abcage
