// Regime parameters and derived constants for the degenerate-diffusion
// dead-core profile solver.
//
// The model is the radial self-similar reduction of a porous-medium equation
// with strong spatially-weighted absorption,
//
//     (f^m)'' + (N-1)/xi (f^m)' + alpha f - beta xi f' - xi^sigma f^q = 0,
//
// in the exponent range m > 1, 0 < q < 1, m + q > 2, at the critical weight
// sigma = 2(1-q)/(m-1).  The decay and expansion rates of the self-similar
// ansatz u(t,x) = exp(-alpha t) f(|x| exp(beta t)) are tied by
// alpha = 2 beta / (m-1); the whole one-parameter family is indexed
// equivalently by beta or by the phase-plane coupling constant
// K = (1/m) (2m/alpha)^{(m-q)/(m-1)}, which is what the shooting layers use.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace deadcore {

/// Thrown when inputs leave the admissible exponent/parameter range.
struct RegimeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Exponents of one admissible regime plus the derived constants that are
/// used everywhere downstream.  Construct through derive() only.
struct Parameters {
    double m = 0;      ///< diffusion exponent, m > 1
    double q = 0;      ///< absorption exponent, 0 < q < 1
    double N = 0;      ///< spatial dimension (real-valued, N >= 1)
    double sigma = 0;  ///< critical absorption weight 2(1-q)/(m-1)
    double mu = 0;     ///< m + q - 2, positive in the strong-absorption range
    double nu = 0;     ///< (m-1)/mu = 1 + (1-q)/mu, always > 1
};

/// One member of the self-similar family: the coupling constant K together
/// with the equivalent exponential rates.
struct KBeta {
    double K = 0;      ///< phase-plane coupling constant, K > 0
    double alpha = 0;  ///< temporal decay rate, alpha = 2 beta/(m-1)
    double beta = 0;   ///< spatial expansion rate, beta > 0
};

/// K-dependent constants of the rescaled (u,v) phase plane.
struct RegimeConstants {
    double z_K = 0;       ///< ordinate of the interior critical point of the (y,z) field
    double lambda_K = 0;  ///< time rescaling factor between the two phase planes
    double c1 = 0;        ///< (m-1)/lambda_K; strictly decreasing in K
    double c2 = 0;        ///< K-independent damping coefficient of the (u,v) field
};

/// Validate raw exponents and fill in the derived constants.
/// Throws RegimeError outside the admissible range (m > 1, q in (0,1),
/// m + q > 2 strictly, N >= 1, all finite).
inline Parameters derive(double m, double q, double N) {
    auto reject = [](const std::string& what) {
        throw RegimeError("In deadcore::derive: " + what);
    };
    if (!(std::isfinite(m) && std::isfinite(q) && std::isfinite(N)))
        reject("parameters must be finite");
    if (!(m > 1.0))
        reject("need m > 1, got m = " + std::to_string(m));
    if (!(q > 0.0 && q < 1.0))
        reject("need q in (0,1), got q = " + std::to_string(q));
    if (!(m + q > 2.0))  // equality is excluded: mu = 0 degenerates nu
        reject("need m + q > 2, got m + q = " + std::to_string(m + q));
    if (!(N >= 1.0))
        reject("need N >= 1, got N = " + std::to_string(N));

    Parameters p;
    p.m = m;
    p.q = q;
    p.N = N;
    p.sigma = 2.0 * (1.0 - q) / (m - 1.0);
    p.mu = m + q - 2.0;
    p.nu = (m - 1.0) / p.mu;
    return p;
}

/// Map an expansion rate beta > 0 to the full (K, alpha, beta) triple.
inline KBeta k_from_beta(const Parameters& p, double beta) {
    if (!(std::isfinite(beta) && beta > 0.0))
        throw RegimeError("In deadcore::k_from_beta: need beta > 0");
    KBeta kb;
    kb.beta = beta;
    kb.alpha = 2.0 * beta / (p.m - 1.0);
    kb.K = std::pow(2.0 * p.m / kb.alpha, (p.m - p.q) / (p.m - 1.0)) / p.m;
    return kb;
}

/// Inverse of k_from_beta: recover the rates from the coupling constant.
inline KBeta beta_from_k(const Parameters& p, double K) {
    if (!(std::isfinite(K) && K > 0.0))
        throw RegimeError("In deadcore::beta_from_k: need K > 0");
    KBeta kb;
    kb.K = K;
    kb.alpha = 2.0 * p.m * std::pow(p.m * K, -(p.m - 1.0) / (p.m - p.q));
    kb.beta = 0.5 * kb.alpha * (p.m - 1.0);
    return kb;
}

/// Constants of the rescaled phase plane at coupling K.
inline RegimeConstants regime_constants(const Parameters& p, double K) {
    if (!(std::isfinite(K) && K > 0.0))
        throw RegimeError("In deadcore::regime_constants: need K > 0");
    const double m = p.m, N = p.N;
    const double A = N * (m - 1.0) + 2.0;
    RegimeConstants rc;
    rc.z_K = std::pow(K * (m - 1.0) * (m - 1.0) / (2.0 * A), p.mu / (m - p.q));
    rc.lambda_K = std::sqrt(2.0 * A / (m - 1.0)) * std::pow(rc.z_K, p.nu);
    rc.c1 = (m - 1.0) / rc.lambda_K;
    rc.c2 = (N * (m - 1.0) + 2.0 * m + 2.0) / std::sqrt(2.0 * (m - 1.0) * A);
    return rc;
}

}  // namespace deadcore
