#pragma once

#include <cstdint>
#include <vector>

namespace abcage {

/// Blue-sideband flopping model parameters. Time is ms, omega is rad/ms.
struct SidebandModelParams {
    double omega = 0.0;  ///< carrier Rabi angular frequency
    double eta = 0.092;  ///< Lamb-Dicke parameter
    int n_max = 7;       ///< highest phonon bin used in the fit

    void validate() const;
};

/// Phonon-number populations p(0..n_max). The fit may leave tail mass
/// unassigned, so the sum is bounded by 1 but need not reach it.
struct PhononDistribution {
    std::vector<double> p;

    void validate() const;
    double total() const;
};

/// Time-stamped bright-state probabilities with a common shot count.
struct SidebandDataset {
    std::vector<double> times;
    std::vector<double> bright_probability;
    int shots = 1;

    void validate() const;
};

/// Generalized Laguerre polynomial L_n^alpha(x) by the three-term recurrence.
double laguerre_gen(int n, int alpha, double x);

/// Rabi angular frequency of the |n> component of the blue-sideband signal:
/// omega * (e^{-eta^2/2} / sqrt(n+1)) * eta * L_n^1(eta^2).
double sideband_frequency(int n, const SidebandModelParams& params);

/// P(bright, t) = 1/2 sum_n p(n) (1 + cos(w_n t)). Implemented exactly in
/// this form; there is no decoherence envelope.
std::vector<double> sideband_signal(const PhononDistribution& dist,
                                    const SidebandModelParams& params,
                                    const std::vector<double>& times);

/// Binomial(shots, P)/shots draw per point; seeded and reproducible.
SidebandDataset synthesize_sideband_data(const PhononDistribution& dist,
                                         const SidebandModelParams& params,
                                         const std::vector<double>& times, int shots,
                                         std::uint64_t seed);

struct PhononFit {
    PhononDistribution distribution;
    /// Per-bin standard error from the linear-model covariance at the
    /// solution. Bins pinned at zero carry a one-sided bound.
    std::vector<double> uncertainty;
    std::vector<bool> one_sided;
    double residual_norm = 0.0;
    double condition_number = 0.0;
    /// Set when the design cannot resolve the requested frequencies (times
    /// too short or too coarse for n_max).
    bool conditioning_warning = false;
};

/// Least-squares reconstruction of p(0..n_max) with the sideband Rabi
/// frequency held fixed (params.omega and params.eta are calibrated inputs,
/// not fit variables). The model is linear in p, so the simplex-constrained
/// problem (p >= 0, sum p <= 1) is solved exactly by an active-set
/// non-negative least squares pass; no local minima are possible.
PhononFit fit_phonon_populations(const SidebandDataset& data, const SidebandModelParams& params);

} // namespace abcage
