#include "crn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace crn {

namespace {

std::string state_to_string(const Vec& w) {
    std::ostringstream out;
    out << '(';
    for (int i = 0; i < w.size(); ++i) out << (i ? ", " : "") << w[i];
    out << ')';
    return out.str();
}

bool admissible(const Vec& w) { return w.allFinite() && w.minCoeff() > 0.0; }

}  // namespace

Trajectory integrate(const ReactionNetwork& net, const Vec& w0, const IntegrateOptions& opt) {
    if (w0.size() != net.species_count())
        throw std::invalid_argument("state dimension does not match species count");
    if (w0.minCoeff() <= 0.0)
        throw std::invalid_argument("initial state must be strictly positive");
    if (!(opt.step > 0.0)) throw std::invalid_argument("step must be positive");
    if (opt.equilibrium.size() != 0 && opt.equilibrium.size() != w0.size())
        throw std::invalid_argument("equilibrium dimension mismatch");

    auto rhs = [&](const Vec& w) { return mass_action_rate(net, w); };

    Trajectory traj;
    traj.equilibrium = opt.equilibrium;
    auto record = [&](double t, const Vec& w) {
        traj.times.push_back(t);
        traj.states.push_back(w);
        traj.dissipation.push_back(dissipation(net, w));
        if (traj.has_equilibrium())
            traj.entropy.push_back(relative_entropy(w, traj.equilibrium));
    };

    Vec w = w0;
    double t = 0.0;
    record(t, w);
    const double t_eps = 1e-12 * std::max(1.0, opt.t_end);
    while (t < opt.t_end - t_eps) {
        double h = std::min(opt.step, opt.t_end - t);
        int halvings = 0;
        while (true) {
            const Vec k1 = rhs(w);
            const Vec k2 = rhs(w + 0.5 * h * k1);
            const Vec k3 = rhs(w + 0.5 * h * k2);
            const Vec k4 = rhs(w + h * k3);
            const Vec next = w + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (admissible(next)) {
                w = next;
                t += h;
                break;
            }
            if (++halvings > opt.max_halvings) {
                std::ostringstream msg;
                msg << "positivity could not be maintained at t = " << t << " from state "
                    << state_to_string(w) << " (step halved " << opt.max_halvings
                    << " times)";
                throw std::runtime_error(msg.str());
            }
            h *= 0.5;
        }
        record(t, w);
    }
    return traj;
}

Trajectory integrate(const ReactionNetwork& net, const Vec& w0, double t_end, double step) {
    IntegrateOptions opt;
    opt.t_end = t_end;
    opt.step = step;
    return integrate(net, w0, opt);
}

// ---------------------------------------------------------------------------
// Equilibrium
// ---------------------------------------------------------------------------

namespace {

// Any positive detailed-balanced state: exp of a solution of the log-linear
// system (beta - alpha) . x = log(k_fw / k_bw). Throws when inconsistent,
// i.e. when the network violates the Wegscheider conditions.
Vec detailed_balance_anchor(const ReactionNetwork& net) {
    const int rows = net.reaction_count();
    Mat wt(rows, net.species_count());
    Vec q(rows);
    for (int r = 0; r < rows; ++r) {
        const Reaction& rx = net.reaction(r);
        wt.row(r) = (rx.beta - rx.alpha).cast<double>().transpose();
        q[r] = std::log(rx.k_fw / rx.k_bw);
    }
    Eigen::ColPivHouseholderQR<Mat> qr(wt);
    const Vec x = qr.solve(q);
    const double residual = (wt * x - q).cwiseAbs().maxCoeff();
    if (residual > 1e-8 * (1.0 + q.cwiseAbs().maxCoeff())) {
        std::ostringstream msg;
        msg << "network has no detailed-balanced equilibrium (log-linear system "
               "inconsistent, residual "
            << residual << ")";
        throw NotDetailedBalanced(msg.str());
    }
    return x.array().exp().matrix();
}

}  // namespace

Vec equilibrium_in_class(const ReactionNetwork& net, const Vec& w0, double tol) {
    if (w0.size() != net.species_count())
        throw std::invalid_argument("state dimension does not match species count");
    if (w0.minCoeff() <= 0.0)
        throw std::invalid_argument("initial state must be strictly positive");

    const Vec anchor = detailed_balance_anchor(net);
    const Mat a = conservation_basis(net);
    if (a.rows() == 0) return anchor;  // the class is the whole orthant

    // Newton on the dual of entropy minimization over the class:
    // g(nu) = sum_i anchor_i exp((A^T nu)_i) - (A w0) . nu, grad g = A w(nu) - b.
    const Vec b = a * w0;
    const double grad_stop = std::min(tol, 1e-13) * std::max(1.0, b.cwiseAbs().maxCoeff());

    auto dual_value = [&](const Vec& nu) {
        const Vec y = a.transpose() * nu;
        if (y.maxCoeff() > 500.0) return std::numeric_limits<double>::infinity();
        return (anchor.array() * y.array().exp()).sum() - b.dot(nu);
    };

    Vec nu = Vec::Zero(a.rows());
    bool converged = false;
    for (int iter = 0; iter < 200; ++iter) {
        const Vec w = (anchor.array() * (a.transpose() * nu).array().exp()).matrix();
        const Vec grad = a * w - b;
        if (grad.cwiseAbs().maxCoeff() <= grad_stop) {
            converged = true;
            break;
        }
        const Mat hess = a * w.asDiagonal() * a.transpose();
        const Vec step = hess.ldlt().solve(-grad);
        double s = 1.0;
        const double g0 = dual_value(nu);
        const double slope = grad.dot(step);
        while (s > 1e-20 && dual_value(nu + s * step) > g0 + 1e-4 * s * slope) s *= 0.5;
        if (s <= 1e-20) break;
        nu += s * step;
    }

    Vec result = (anchor.array() * (a.transpose() * nu).array().exp()).matrix();
    const double class_tol = std::max(tol, 1e-12);
    const bool in_class =
        (a * result - b).cwiseAbs().maxCoeff() <= class_tol * std::max(1.0, b.cwiseAbs().maxCoeff());
    if (converged && in_class) return result;

    // Newton stalled: fall back to following the flow for a long time
    const Trajectory tail = integrate(net, w0, 1000.0, 1e-3);
    result = tail.final_state();
    const auto db = check_detailed_balance(net, result, std::max(tol, 1e-9));
    if (!db.balanced)
        throw std::runtime_error("equilibrium solve failed: Newton stalled and long-time "
                                 "integration did not reach detailed balance");
    return result;
}

double relative_entropy(const Vec& w, const Vec& w_inf) {
    if (w.size() != w_inf.size()) throw std::invalid_argument("dimension mismatch");
    if (w.size() == 0 || w.minCoeff() <= 0.0 || w_inf.minCoeff() <= 0.0)
        throw std::invalid_argument("relative_entropy requires strictly positive states");
    double e = 0.0;
    for (int i = 0; i < w.size(); ++i)
        e += w[i] * std::log(w[i] / w_inf[i]) - w[i] + w_inf[i];
    return e;
}

double dissipation(const ReactionNetwork& net, const Vec& w) {
    if (w.size() != net.species_count())
        throw std::invalid_argument("state dimension does not match species count");
    if (w.minCoeff() <= 0.0)
        throw std::invalid_argument("dissipation requires a strictly positive state");
    double d = 0.0;
    for (const Reaction& r : net.reactions()) {
        const double fwd = r.k_fw * monomial(w, r.alpha);
        const double bwd = r.k_bw * monomial(w, r.beta);
        d += (fwd - bwd) * std::log(fwd / bwd);
    }
    return d;
}

// ---------------------------------------------------------------------------
// Rate certificate (Bakry-Emery constants for one reversible reaction)
// ---------------------------------------------------------------------------

namespace {

Rational rational_pow(Rational base, int exponent) {
    Rational out = 1;
    for (int k = 0; k < exponent; ++k) out *= base;
    return out;
}

}  // namespace

RateCertificate rate_certificate(const ReactionNetwork& net, const std::vector<Rational>& w0) {
    if (net.reaction_count() != 1)
        throw std::invalid_argument("certificate requires a single reversible reaction");
    const Reaction& rx = net.reaction(0);
    if (std::abs(rx.k_fw - 1.0) > 1e-12 || std::abs(rx.k_bw - 1.0) > 1e-12)
        throw std::invalid_argument(
            "certificate requires unit rate constants; rescale time and concentrations first");
    if (static_cast<int>(w0.size()) != net.species_count())
        throw std::invalid_argument("state dimension does not match species count");

    RateCertificate cert;
    for (int i = 0; i < net.species_count(); ++i) {
        if (w0[i] <= 0) throw std::invalid_argument("initial state must be strictly positive");
        const bool reactant = rx.alpha[i] >= 1;
        const bool product = rx.beta[i] >= 1;
        if (reactant == product)
            throw std::invalid_argument(
                "certificate requires disjoint reactant/product sides with all "
                "coefficients >= 1");
        (reactant ? cert.reactant_index : cert.product_index).push_back(i);
    }
    const int m = static_cast<int>(cert.reactant_index.size());
    const int n = static_cast<int>(cert.product_index.size());
    if (m == 0 || n == 0)
        throw std::invalid_argument("certificate requires species on both sides");

    auto alpha_of = [&](int i) { return rx.alpha[cert.reactant_index[i]]; };
    auto beta_of = [&](int j) { return rx.beta[cert.product_index[j]]; };

    // masses M_ij = a_i0/alpha_i + b_j0/beta_j, exactly
    std::vector<std::vector<Rational>> mass(m, std::vector<Rational>(n));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            mass[i][j] = w0[cert.reactant_index[i]] / alpha_of(i) +
                         w0[cert.product_index[j]] / beta_of(j);

    std::vector<Rational> row_min(m), col_min(n);
    for (int i = 0; i < m; ++i)
        row_min[i] = *std::min_element(mass[i].begin(), mass[i].end());
    for (int j = 0; j < n; ++j) {
        col_min[j] = mass[0][j];
        for (int i = 1; i < m; ++i) col_min[j] = std::min(col_min[j], mass[i][j]);
    }

    // case (i), for each candidate small reactant i0:
    //   prod_j K_j^{beta_j} * sum_j beta_j / col_min_j, K_j = beta_j/2 * row_min_{i0}
    Rational sum_beta_over_colmin = 0;
    for (int j = 0; j < n; ++j) sum_beta_over_colmin += Rational(beta_of(j)) / col_min[j];

    Rational best_case_i;
    int best_i0 = 0;
    for (int i0 = 0; i0 < m; ++i0) {
        Rational prod_k = 1;
        for (int j = 0; j < n; ++j)
            prod_k *= rational_pow(Rational(beta_of(j), 2) * row_min[i0], beta_of(j));
        const Rational value = prod_k * sum_beta_over_colmin;
        if (i0 == 0 || value < best_case_i) {
            best_case_i = value;
            best_i0 = i0;
        }
    }

    // case (ii): prod_i L_i^{alpha_i} * sum_i alpha_i^2 / L_i, L_i = alpha_i/2 * row_min_i
    std::vector<Rational> l_const(m);
    Rational prod_l = 1, sum_alpha2_over_l = 0;
    for (int i = 0; i < m; ++i) {
        l_const[i] = Rational(alpha_of(i), 2) * row_min[i];
        prod_l *= rational_pow(l_const[i], alpha_of(i));
        sum_alpha2_over_l += Rational(alpha_of(i) * alpha_of(i)) / l_const[i];
    }
    const Rational case_ii = prod_l * sum_alpha2_over_l;

    cert.lambda_exact = std::min(best_case_i, case_ii);
    cert.lambda = to_double(cert.lambda_exact);
    cert.minimizing_reactant = best_i0;

    cert.masses = Mat(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) cert.masses(i, j) = to_double(mass[i][j]);
    cert.k_constants = Vec(n);
    for (int j = 0; j < n; ++j)
        cert.k_constants[j] = to_double(Rational(beta_of(j), 2) * row_min[best_i0]);
    cert.l_constants = Vec(m);
    for (int i = 0; i < m; ++i) cert.l_constants[i] = to_double(l_const[i]);

    cert.initial_state = Vec(net.species_count());
    for (int i = 0; i < net.species_count(); ++i) cert.initial_state[i] = to_double(w0[i]);
    cert.equilibrium = equilibrium_in_class(net, cert.initial_state, 1e-13);

    // entropy-vs-squared-distance constant: the worst of
    // (sqrt(alpha_i M_i1) + sqrt(a_inf))^2 / a_inf over reactants and the
    // product analogue with M_1j
    double big_m = 0.0;
    for (int i = 0; i < m; ++i) {
        const double a_inf = cert.equilibrium[cert.reactant_index[i]];
        const double cap = alpha_of(i) * cert.masses(i, 0);
        const double v = std::pow(std::sqrt(cap) + std::sqrt(a_inf), 2) / a_inf;
        big_m = std::max(big_m, v);
    }
    for (int j = 0; j < n; ++j) {
        const double b_inf = cert.equilibrium[cert.product_index[j]];
        const double cap = beta_of(j) * cert.masses(0, j);
        const double v = std::pow(std::sqrt(cap) + std::sqrt(b_inf), 2) / b_inf;
        big_m = std::max(big_m, v);
    }
    cert.big_m = big_m;
    cert.c1 = 1.0 / big_m;
    return cert;
}

RateCertificate rate_certificate(const ReactionNetwork& net, const Vec& w0) {
    std::vector<Rational> exact(w0.size());
    for (int i = 0; i < w0.size(); ++i) exact[i] = rational_from_double(w0[i]);
    return rate_certificate(net, exact);
}

double lambda_functional(const ReactionNetwork& net, const Vec& w) {
    if (net.reaction_count() != 1)
        throw std::invalid_argument("lambda functional is defined for a single reaction");
    if (w.minCoeff() <= 0.0)
        throw std::invalid_argument("lambda functional requires a strictly positive state");
    const Reaction& rx = net.reaction(0);
    double reactant_sum = 0.0, product_sum = 0.0;
    for (int i = 0; i < w.size(); ++i) {
        if (rx.alpha[i] > 0) reactant_sum += double(rx.alpha[i]) * rx.alpha[i] / w[i];
        if (rx.beta[i] > 0) product_sum += double(rx.beta[i]) * rx.beta[i] / w[i];
    }
    return monomial(w, rx.alpha) * reactant_sum + monomial(w, rx.beta) * product_sum;
}

DecayCheck verify_exponential_decay(const Trajectory& traj, const RateCertificate& cert,
                                    double slack) {
    if (traj.states.empty()) throw std::invalid_argument("empty trajectory");
    if (traj.states.front().size() != cert.equilibrium.size())
        throw std::invalid_argument("trajectory and certificate dimensions differ");
    if ((traj.states.front() - cert.initial_state).cwiseAbs().maxCoeff() >
        1e-9 * (1.0 + cert.initial_state.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("trajectory does not start at the certificate's state");
    if (traj.dissipation.empty())
        throw std::invalid_argument("trajectory carries no dissipation record");

    const Vec& winf = cert.equilibrium;
    const double e0 = relative_entropy(traj.states.front(), winf);
    const double d0 = traj.dissipation.front();
    // absolute allowance for rounding when a reference value is zero
    const double atol = 1e-14 * std::max(1.0, winf.sum());

    DecayCheck check;
    check.ok = true;
    check.max_violation = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < traj.size(); ++k) {
        const double decay = std::exp(-cert.lambda * traj.times[k]);
        const Vec& w = traj.states[k];
        const double values[3] = {relative_entropy(w, winf), traj.dissipation[k],
                                  (w - winf).squaredNorm()};
        const double bounds[3] = {e0 * decay, d0 * decay, e0 / cert.c1 * decay};
        for (int c = 0; c < 3; ++c) {
            const double excess = values[c] - bounds[c] * (1.0 + slack) - atol;
            const double violation = excess / std::max(bounds[c], atol);
            check.max_violation = std::max(check.max_violation, violation);
            if (excess > 0.0 && check.ok) {
                check.ok = false;
                check.first_violation_time = traj.times[k];
            }
        }
    }
    return check;
}

}  // namespace crn
