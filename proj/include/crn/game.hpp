#pragma once

#include "crn/network.hpp"
#include "crn/symmetry.hpp"

#include <vector>

namespace crn {

/// Logarithmic mean: (a-b)/(log a - log b) for a != b, a for a = b.
/// Stable near a = b (series in (a-b)/(a+b), no cancellation).
double log_mean(double a, double b);

/// The n-player game attached to a detailed-balanced mass-action network:
/// player i controls concentration w_i and minimizes the loss whose own-
/// variable derivative is the i-th simultaneous-gradient component.
/// Immutable; all evaluations are pure.
class CrnGame {
public:
    /// Requires a strictly positive, detailed-balanced equilibrium
    /// (relative flux residuals <= 1e-10); fixes kappa_r = k_fw^r w_inf^alpha.
    CrnGame(ReactionNetwork network, Vec equilibrium);

    const ReactionNetwork& network() const { return network_; }
    const Vec& equilibrium() const { return equilibrium_; }
    const Vec& kappas() const { return kappas_; }
    int players() const { return network_.species_count(); }

private:
    ReactionNetwork network_;
    Vec equilibrium_;
    Vec kappas_;
};

/// Player loss: each rate monomial antidifferentiated in w_i.
double loss(const CrnGame& game, int player, const Vec& w);

/// xi(w) = sum_r (k_fw w^alpha - k_bw w^beta)(alpha - beta); the negative of
/// the mass-action rate.
Vec simultaneous_gradient(const CrnGame& game, const Vec& w);

/// E(w) = sum_i w_i (log(w_i / w_inf,i) - 1).
double entropy(const CrnGame& game, const Vec& w);

/// log(w / w_inf), componentwise.
Vec entropy_gradient(const CrnGame& game, const Vec& w);

/// Onsager matrix H(w) = sum_r kappa_r l(w^a/winf^a, w^b/winf^b) (a-b)(a-b)^T;
/// symmetric positive semidefinite.
Mat onsager_matrix(const CrnGame& game, const Vec& w);

/// Quadratic dissipation dual, 0.5 mu^T H(w) mu.
double psi_star(const CrnGame& game, const Vec& w, const Vec& mu);

/// cosh-type dual: sum_r 2 kappa_r w^((alpha+beta)/2) (cosh((alpha-beta).mu) - 1).
double psi_star_cosh(const CrnGame& game, const Vec& w, const Vec& mu);

/// Residual of the generalized-potential identity xi = H grad E,
/// ||xi - H grad E||_inf / (1 + ||xi||_inf). Zero under detailed balance.
double verify_generalized_potential(const CrnGame& game, const Vec& w);

/// Potential difference along the straight segment z0 -> z1 via Simpson
/// quadrature of z'(t) . grad E(z(t)); equals entropy(z1) - entropy(z0).
/// Throws if the segment leaves the positive orthant.
double generalized_potential_difference(const CrnGame& game, const Vec& z0, const Vec& z1,
                                        int quadrature_steps);

/// Same integral along a piecewise-linear path through the given waypoints.
double generalized_potential_difference(const CrnGame& game,
                                        const std::vector<Vec>& waypoints,
                                        int quadrature_steps);

/// Analytic game Hessian: entry (i,j) = d xi_i / d w_j (players are scalar).
Mat game_hessian(const CrnGame& game, const Vec& w);

/// One-stop evaluation of the dissipation structure at (w, mu).
struct DissipationEvaluation {
    Mat onsager;
    double psi_star = 0.0;
    double psi_star_cosh = 0.0;
};
DissipationEvaluation evaluate_dissipation(const CrnGame& game, const Vec& w,
                                           const Vec& mu);

/// Loss values, simultaneous gradient and game Hessian at one state.
struct LossBundle {
    Vec losses;
    Vec simultaneous_gradient;
    Mat game_hessian;
};
LossBundle evaluate_losses(const CrnGame& game, const Vec& w);

/// View of the CRN game as a DifferentiableGame with analytic derivatives
/// (scalar strategies, positive-orthant domain).
DifferentiableGame as_differentiable_game(const CrnGame& game);

}  // namespace crn
