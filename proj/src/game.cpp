#include "crn/game.hpp"

#include <cmath>
#include <sstream>

namespace crn {

double log_mean(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("log_mean requires positive arguments");
    const double u = (a - b) / (a + b);
    if (std::abs(u) <= 1e-2) {
        // l(a,b) = (a+b)/2 / (1 + u^2/3 + u^4/5 + u^6/7 + ...); the truncation
        // error is below machine epsilon for |u| <= 1e-2
        const double u2 = u * u;
        return 0.5 * (a + b) / (1.0 + u2 * (1.0 / 3.0 + u2 * (1.0 / 5.0 + u2 / 7.0)));
    }
    return (a - b) / (std::log(a) - std::log(b));
}

namespace {

void require_positive(const Vec& w, const char* what) {
    if (w.size() == 0 || w.minCoeff() <= 0.0)
        throw std::invalid_argument(std::string(what) + " requires a strictly positive state");
}

}  // namespace

CrnGame::CrnGame(ReactionNetwork network, Vec equilibrium)
    : network_(std::move(network)), equilibrium_(std::move(equilibrium)) {
    if (equilibrium_.size() != network_.species_count())
        throw std::invalid_argument("equilibrium dimension does not match species count");
    require_positive(equilibrium_, "CrnGame");
    const auto report = check_detailed_balance(network_, equilibrium_, 1e-10);
    if (!report.balanced) {
        std::ostringstream msg;
        msg << "equilibrium is not detailed balanced (max relative flux residual "
            << report.max_relative() << ")";
        throw std::invalid_argument(msg.str());
    }
    kappas_ = Vec(network_.reaction_count());
    for (int r = 0; r < network_.reaction_count(); ++r) {
        const Reaction& rx = network_.reaction(r);
        kappas_[r] = rx.k_fw * monomial(equilibrium_, rx.alpha);
    }
}

double loss(const CrnGame& game, int player, const Vec& w) {
    const ReactionNetwork& net = game.network();
    if (player < 0 || player >= net.species_count())
        throw std::out_of_range("player index out of range");
    require_positive(w, "loss");
    double value = 0.0;
    for (const Reaction& r : net.reactions()) {
        const int ai = r.alpha[player];
        const int bi = r.beta[player];
        if (ai == bi) continue;
        // each monomial of the rate, antidifferentiated in w_player
        const double fwd = r.k_fw / (ai + 1) * monomial(w, r.alpha) * w[player];
        const double bwd = r.k_bw / (bi + 1) * monomial(w, r.beta) * w[player];
        value += (fwd - bwd) * (ai - bi);
    }
    return value;
}

Vec simultaneous_gradient(const CrnGame& game, const Vec& w) {
    return -mass_action_rate(game.network(), w);
}

double entropy(const CrnGame& game, const Vec& w) {
    require_positive(w, "entropy");
    const Vec& winf = game.equilibrium();
    double e = 0.0;
    for (int i = 0; i < w.size(); ++i) e += w[i] * (std::log(w[i] / winf[i]) - 1.0);
    return e;
}

Vec entropy_gradient(const CrnGame& game, const Vec& w) {
    require_positive(w, "entropy_gradient");
    return (w.array() / game.equilibrium().array()).log().matrix();
}

namespace {

// log-mean factor of reaction r at state w: l(w^a/winf^a, w^b/winf^b)
double reaction_log_mean(const CrnGame& game, const Reaction& r, const Vec& w) {
    const Vec& winf = game.equilibrium();
    const double xa = monomial(w, r.alpha) / monomial(winf, r.alpha);
    const double xb = monomial(w, r.beta) / monomial(winf, r.beta);
    return log_mean(xa, xb);
}

}  // namespace

Mat onsager_matrix(const CrnGame& game, const Vec& w) {
    require_positive(w, "onsager_matrix");
    const ReactionNetwork& net = game.network();
    Mat h = Mat::Zero(net.species_count(), net.species_count());
    for (int r = 0; r < net.reaction_count(); ++r) {
        const Reaction& rx = net.reaction(r);
        const Vec gamma = (rx.alpha - rx.beta).cast<double>();
        h += game.kappas()[r] * reaction_log_mean(game, rx, w) * gamma * gamma.transpose();
    }
    return h;
}

double psi_star(const CrnGame& game, const Vec& w, const Vec& mu) {
    require_positive(w, "psi_star");
    const ReactionNetwork& net = game.network();
    double value = 0.0;
    for (int r = 0; r < net.reaction_count(); ++r) {
        const Reaction& rx = net.reaction(r);
        const double slope = mu.dot((rx.alpha - rx.beta).cast<double>());
        value += 0.5 * game.kappas()[r] * reaction_log_mean(game, rx, w) * slope * slope;
    }
    return value;
}

double psi_star_cosh(const CrnGame& game, const Vec& w, const Vec& mu) {
    require_positive(w, "psi_star_cosh");
    const ReactionNetwork& net = game.network();
    double value = 0.0;
    for (int r = 0; r < net.reaction_count(); ++r) {
        const Reaction& rx = net.reaction(r);
        const double slope = mu.dot((rx.alpha - rx.beta).cast<double>());
        double geometric = 1.0;  // w^((alpha+beta)/2)
        for (int i = 0; i < w.size(); ++i) {
            const int e = rx.alpha[i] + rx.beta[i];
            if (e != 0) geometric *= std::pow(w[i], 0.5 * e);
        }
        value += 2.0 * game.kappas()[r] * geometric * (std::cosh(slope) - 1.0);
    }
    return value;
}

double verify_generalized_potential(const CrnGame& game, const Vec& w) {
    require_positive(w, "verify_generalized_potential");
    const Vec xi = simultaneous_gradient(game, w);
    const Vec hgrad = onsager_matrix(game, w) * entropy_gradient(game, w);
    return (xi - hgrad).cwiseAbs().maxCoeff() / (1.0 + xi.cwiseAbs().maxCoeff());
}

namespace {

// Simpson quadrature of z'(t) . grad E(z(t)) over one straight segment.
double segment_potential_difference(const CrnGame& game, const Vec& z0, const Vec& z1,
                                    int intervals) {
    const Vec delta = z1 - z0;
    auto integrand = [&](double t) {
        const Vec z = z0 + t * delta;
        if (z.minCoeff() <= 0.0)
            throw std::domain_error("path leaves the positive orthant at t = " +
                                    std::to_string(t));
        return delta.dot(entropy_gradient(game, z));
    };
    const double h = 1.0 / intervals;
    double sum = integrand(0.0) + integrand(1.0);
    for (int k = 1; k < intervals; ++k) sum += (k % 2 ? 4.0 : 2.0) * integrand(k * h);
    return sum * h / 3.0;
}

}  // namespace

double generalized_potential_difference(const CrnGame& game, const Vec& z0, const Vec& z1,
                                        int quadrature_steps) {
    return generalized_potential_difference(game, std::vector<Vec>{z0, z1}, quadrature_steps);
}

double generalized_potential_difference(const CrnGame& game, const std::vector<Vec>& waypoints,
                                        int quadrature_steps) {
    if (waypoints.size() < 2) throw std::invalid_argument("need at least two waypoints");
    if (quadrature_steps < 2) throw std::invalid_argument("need at least 2 quadrature steps");
    const int intervals = quadrature_steps % 2 == 0 ? quadrature_steps : quadrature_steps + 1;
    double total = 0.0;
    for (std::size_t s = 0; s + 1 < waypoints.size(); ++s)
        total += segment_potential_difference(game, waypoints[s], waypoints[s + 1], intervals);
    return total;
}

Mat game_hessian(const CrnGame& game, const Vec& w) {
    require_positive(w, "game_hessian");
    const ReactionNetwork& net = game.network();
    const int n = net.species_count();
    Mat jac = Mat::Zero(n, n);
    for (const Reaction& r : net.reactions()) {
        const double fwd = r.k_fw * monomial(w, r.alpha);
        const double bwd = r.k_bw * monomial(w, r.beta);
        const Vec gamma = (r.alpha - r.beta).cast<double>();
        for (int j = 0; j < n; ++j) {
            if (r.alpha[j] == 0 && r.beta[j] == 0) continue;
            jac.col(j) += gamma * ((r.alpha[j] * fwd - r.beta[j] * bwd) / w[j]);
        }
    }
    return jac;
}

DissipationEvaluation evaluate_dissipation(const CrnGame& game, const Vec& w,
                                           const Vec& mu) {
    DissipationEvaluation out;
    out.onsager = onsager_matrix(game, w);
    out.psi_star = psi_star(game, w, mu);
    out.psi_star_cosh = psi_star_cosh(game, w, mu);
    return out;
}

LossBundle evaluate_losses(const CrnGame& game, const Vec& w) {
    LossBundle out;
    out.losses = Vec(game.players());
    for (int i = 0; i < game.players(); ++i) out.losses[i] = loss(game, i, w);
    out.simultaneous_gradient = simultaneous_gradient(game, w);
    out.game_hessian = game_hessian(game, w);
    return out;
}

DifferentiableGame as_differentiable_game(const CrnGame& game) {
    DifferentiableGame g;
    g.dims.assign(game.players(), 1);
    g.loss = [&game](int i, const Vec& w) { return loss(game, i, w); };
    g.gradient = [&game](int i, const Vec& w) {
        Vec out(1);
        out[0] = simultaneous_gradient(game, w)[i];
        return out;
    };
    g.hessian_block = [&game](int i, int j, const Vec& w) {
        Mat out(1, 1);
        out(0, 0) = game_hessian(game, w)(i, j);
        return out;
    };
    g.in_domain = [n = game.players()](const Vec& w) {
        return w.size() == n && w.minCoeff() > 0.0;
    };
    return g;
}

}  // namespace crn
