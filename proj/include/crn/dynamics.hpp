#pragma once

#include "crn/network.hpp"
#include "crn/rational.hpp"

#include <vector>

namespace crn {

/// A recorded forward integration of the mass-action ODE. Entropy and
/// dissipation are tracked per accepted step when an equilibrium is known.
struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<double> entropy;      // relative entropy vs `equilibrium`; empty without one
    std::vector<double> dissipation;
    Vec equilibrium;                  // size 0 when unknown

    bool has_equilibrium() const { return equilibrium.size() > 0; }
    const Vec& final_state() const { return states.back(); }
    int size() const { return static_cast<int>(times.size()); }
};

struct IntegrateOptions {
    double t_end = 50.0;
    double step = 1e-3;
    Vec equilibrium;          // optional, enables the entropy column
    int max_halvings = 40;    // positivity rescue before giving up
};

/// Classic fixed-step RK4. A step that would leave the closed positive
/// orthant is halved (up to max_halvings) before failing with the time and
/// state of the blow-up.
Trajectory integrate(const ReactionNetwork& net, const Vec& w0, const IntegrateOptions& opt);
Trajectory integrate(const ReactionNetwork& net, const Vec& w0, double t_end, double step);

/// Raised when the Wegscheider conditions fail, i.e. the network admits no
/// detailed-balanced equilibrium at all.
class NotDetailedBalanced : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The unique positive detailed-balanced equilibrium in the compatibility
/// class of w0. Solves the log-linear detailed-balance system for an anchor
/// state, then Newton on the dual of entropy minimization over the class;
/// falls back to long-time integration if Newton stalls. Throws
/// NotDetailedBalanced when no detailed-balanced equilibrium exists.
Vec equilibrium_in_class(const ReactionNetwork& net, const Vec& w0, double tol = 1e-12);

/// sum_i w_i log(w_i/w_inf,i) - w_i + w_inf,i; nonnegative, zero iff w = w_inf.
double relative_entropy(const Vec& w, const Vec& w_inf);

/// Entropy dissipation sum_r (f_r - b_r) log(f_r / b_r) with f, b the forward
/// and backward fluxes; equals -dE/dt along the flow of a detailed-balanced
/// network and is always >= 0.
double dissipation(const ReactionNetwork& net, const Vec& w);

/// Explicit constants certifying exponential decay for one reversible
/// reaction with unit rates (reactant side A_i, product side B_j).
struct RateCertificate {
    std::vector<int> reactant_index;   // species with alpha_i >= 1
    std::vector<int> product_index;    // species with beta_j >= 1
    Mat masses;                        // M_ij = a_i0/alpha_i + b_j0/beta_j
    Vec k_constants;                   // K_j at the minimizing reactant choice
    Vec l_constants;                   // L_i
    int minimizing_reactant = 0;       // index into reactant_index
    double lambda = 0.0;               // decay rate, min over both proof cases
    Rational lambda_exact;             // same value in exact arithmetic
    double big_m = 0.0;                // entropy-vs-distance constant
    double c1 = 0.0;                   // = 1 / big_m
    Vec equilibrium;                   // full-length state
    Vec initial_state;
};

/// Certificate for a single-reaction network (unit rate constants, every
/// species on exactly one side with coefficient >= 1). The masses and lambda
/// are computed in exact rational arithmetic.
RateCertificate rate_certificate(const ReactionNetwork& net, const std::vector<Rational>& w0);
RateCertificate rate_certificate(const ReactionNetwork& net, const Vec& w0);

/// Lambda(a,b) = a^alpha sum_i alpha_i^2/a_i + b^beta sum_j beta_j^2/b_j,
/// the quantity the certificate bounds from below.
double lambda_functional(const ReactionNetwork& net, const Vec& w);

struct DecayCheck {
    bool ok = false;
    double max_violation = 0.0;        // worst relative excess over a bound
    double first_violation_time = -1.0;
};

/// Checks E(t) <= E(0) e^{-lambda t}, D(t) <= D(0) e^{-lambda t} and
/// ||w - w_inf||^2 <= (E(0)/C1) e^{-lambda t}, each within (1 + slack),
/// at every recorded state.
DecayCheck verify_exponential_decay(const Trajectory& traj, const RateCertificate& cert,
                                    double slack = 1e-6);

}  // namespace crn
