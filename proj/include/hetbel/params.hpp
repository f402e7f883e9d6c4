#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hetbel {

/// Raised for parameter sets or grids that violate a model invariant.
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Explicit-scheme step too large for the filter gains.
class StabilityError : public ModelError {
public:
    using ModelError::ModelError;
};

/// An operation that is only defined for a different model or initialization.
class UnsupportedModel : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) throw ModelError(what);
}

inline void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw ModelError(std::string(name) + " must be finite");
}

}  // namespace detail

/// How the drift, the estimates and the filter variances start at t = 0.
enum class InitMode {
    /// Deterministic values from the parameter struct (mu0, muR0, muI0, gammaR0, gammaI0).
    Fixed,
    /// Joint stationary law of (mu, muR, muI): gamma0 = gamma*, bias gap starts at its fixed point.
    Stationary,
};

/// Economy and belief constants for the mean-reverting drift model.
/// e_R has no natural default and starts at 1/2.
struct ModelParams {
    double mu_bar = 0.04;
    double kappa = 0.2;
    double sigma_mu = 0.01;
    double sigma_D = 0.2;
    double sigma_e = 0.05;
    double rho = 0.02;
    double zeta = 0.0;
    double e_R = 0.5;
    double mu0 = 0.04;
    double muR0 = 0.04;
    double muI0 = 0.04;
    double gammaR0 = 0.0;
    double gammaI0 = 0.0;
    InitMode init = InitMode::Fixed;

    double h_D() const { return 1.0 / sigma_D; }
    double h_e() const { return 1.0 / sigma_e; }
    double e_I() const { return 1.0 - e_R; }
    double hR_sq() const { return h_D() * h_D(); }
    double hI_sq() const { return h_D() * h_D() + h_e() * h_e(); }

    void validate() const {
        using detail::require;
        using detail::require_finite;
        require_finite(mu_bar, "mu_bar");
        require_finite(kappa, "kappa");
        require_finite(sigma_mu, "sigma_mu");
        require_finite(sigma_D, "sigma_D");
        require_finite(sigma_e, "sigma_e");
        require_finite(rho, "rho");
        require_finite(zeta, "zeta");
        require_finite(e_R, "e_R");
        require_finite(mu0, "mu0");
        require_finite(muR0, "muR0");
        require_finite(muI0, "muI0");
        require_finite(gammaR0, "gammaR0");
        require_finite(gammaI0, "gammaI0");
        require(sigma_D > 0.0, "sigma_D must be positive");
        require(sigma_e > 0.0, "sigma_e must be positive");
        require(kappa > 0.0, "kappa must be positive");
        require(sigma_mu >= 0.0, "sigma_mu must be non-negative");
        require(rho >= 0.0, "rho must be non-negative");
        require(e_R >= 0.0 && e_R <= 1.0, "e_R must lie in [0,1]");
        require(gammaR0 >= 0.0, "gammaR0 must be non-negative");
        require(gammaI0 >= 0.0, "gammaI0 must be non-negative");
    }

    /// True for the initialization under which the filters are exact conditional
    /// expectations and the MSE curves equal the Riccati solutions.
    bool unbiased_initialization() const {
        if (init == InitMode::Stationary) return true;
        return muR0 == mu0 && muI0 == mu0 && gammaR0 == 0.0 && gammaI0 == 0.0;
    }
};

/// Discretization grid and Monte Carlo size.
struct SimGrid {
    double dt = 0.01;
    double T = 500.0;
    std::size_t n_paths = 20000;
    std::uint64_t seed = 20240501;

    std::size_t n_steps() const { return static_cast<std::size_t>(std::llround(T / dt)); }
    double time(std::size_t k) const { return static_cast<double>(k) * dt; }

    void validate() const {
        detail::require(std::isfinite(dt) && dt > 0.0, "grid.dt must be positive");
        detail::require(std::isfinite(T) && T >= dt, "grid.T must be at least grid.dt");
        detail::require(n_paths > 0, "grid.n_paths must be positive");
        const double err = std::abs(static_cast<double>(n_steps()) * dt - T);
        detail::require(err < 0.5 * dt, "grid.T is not resolvable on grid.dt");
    }
};

/// Two-state Markov-chain drift with the shared economy constants.
struct TwoStateParams {
    double mu_h = 0.1;
    double mu_l = -0.2;
    double lambda_hl = 0.2;  ///< intensity high -> low
    double psi_lh = 0.2;     ///< intensity low -> high
    double sigma_D = 0.2;
    double sigma_e = 0.05;
    double rho = 0.02;
    double zeta = 0.0;
    double e_R = 0.5;
    double mu0 = -0.2;  ///< initial true state, one of mu_h / mu_l
    double muR0 = -0.05;
    double muI0 = -0.05;
    /// Draw the initial state from the chain's stationary law (mu0 is then ignored).
    bool stationary_start = false;

    double h_D() const { return 1.0 / sigma_D; }
    double h_e() const { return 1.0 / sigma_e; }
    double e_I() const { return 1.0 - e_R; }
    double hR_sq() const { return h_D() * h_D(); }
    double hI_sq() const { return h_D() * h_D() + h_e() * h_e(); }

    /// Long-run probability of the high state.
    double p_high() const { return psi_lh / (lambda_hl + psi_lh); }

    /// Stationary mean of the chain; the filters revert toward it.
    double mu_inf() const { return (psi_lh * mu_h + lambda_hl * mu_l) / (lambda_hl + psi_lh); }

    /// Posterior variance of the drift at estimate x.
    double nu(double x) const { return (mu_h - x) * (x - mu_l); }

    /// Clamp margin that keeps estimates strictly inside (mu_l, mu_h).
    double clamp_eps() const { return 1e-12 * (mu_h - mu_l); }

    void validate() const {
        using detail::require;
        for (double v : {mu_h, mu_l, lambda_hl, psi_lh, sigma_D, sigma_e, rho, zeta, e_R, mu0, muR0, muI0})
            detail::require_finite(v, "two-state parameter");
        require(mu_h > mu_l, "two-state model requires mu_h > mu_l");
        require(lambda_hl > 0.0 && psi_lh > 0.0, "transition intensities must be positive");
        require(sigma_D > 0.0 && sigma_e > 0.0, "volatilities must be positive");
        require(rho >= 0.0, "rho must be non-negative");
        require(e_R >= 0.0 && e_R <= 1.0, "e_R must lie in [0,1]");
        require(stationary_start || mu0 == mu_h || mu0 == mu_l, "initial state must be mu_h or mu_l");
        require(muR0 >= mu_l && muR0 <= mu_h, "muR0 must lie in [mu_l, mu_h]");
        require(muI0 >= mu_l && muI0 <= mu_h, "muI0 must lie in [mu_l, mu_h]");
    }

    /// Near-degenerate chain used to show the e_R = 0 slope sign can flip under bias.
    static TwoStateParams counterexample() {
        TwoStateParams p;
        p.mu_h = 0.1;
        p.mu_l = 0.099;
        p.lambda_hl = 0.2;
        p.psi_lh = 0.2;
        p.rho = 100.0;
        p.zeta = -0.01;
        p.e_R = 0.0;
        p.mu0 = p.mu_l;
        p.muR0 = p.mu_l;
        p.muI0 = p.mu_l;
        return p;
    }

    /// Business-cycle calibration with a wide state gap.
    static TwoStateParams realistic() {
        TwoStateParams p;
        p.stationary_start = true;
        p.muR0 = p.mu_inf();
        p.muI0 = p.mu_inf();
        return p;
    }
};

}  // namespace hetbel
