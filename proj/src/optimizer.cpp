#include "crn/optimizer.hpp"

#include <cmath>
#include <sstream>

namespace crn {

Projector::Projector(const Mat& constraints)
    : n_(static_cast<int>(constraints.cols())), rows_(static_cast<int>(constraints.rows())) {
    if (rows_ == 0) return;  // no constraints: P = I
    Eigen::ColPivHouseholderQR<Mat> qr(constraints.transpose());
    rank_ = static_cast<int>(qr.rank());
    if (rank_ == 0) return;
    Mat q = qr.householderQ() * Mat::Identity(n_, rank_);
    range_q_ = q;
}

Vec Projector::apply(const Vec& x) const {
    if (x.size() != n_) throw std::invalid_argument("projector dimension mismatch");
    if (rank_ == 0) return x;
    return x - range_q_ * (range_q_.transpose() * x);
}

Vec Projector::range_component(const Vec& v) const {
    if (v.size() != n_) throw std::invalid_argument("projector dimension mismatch");
    if (rank_ == 0) return Vec::Zero(n_);
    return range_q_ * (range_q_.transpose() * v);
}

Mat Projector::dense() const {
    Mat p = Mat::Identity(n_, n_);
    if (rank_ == 0) return p;
    return p - range_q_ * range_q_.transpose();
}

Mat projection_matrix(const Mat& constraints) { return Projector(constraints).dense(); }

const char* to_string(Termination t) {
    switch (t) {
        case Termination::Converged: return "Converged";
        case Termination::MaxIterations: return "MaxIterations";
        case Termination::StalledOnBoundary: return "StalledOnBoundary";
    }
    return "?";
}

// Shared descent loop. `grad` yields the field whose projection drives the
// step and the stopping test; `objective` is recorded and used for Armijo.
// `merit_gradient` supplies the objective's own gradient when it differs
// from `grad` (simultaneous descent: direction -P xi, merit entropy).
static DescentTrace descent_loop(const std::function<double(const Vec&)>& objective,
                                 const std::function<Vec(const Vec&)>& grad,
                                 const std::function<Vec(const Vec&)>& merit_gradient,
                                 const Projector& projector, bool positive_domain,
                                 const Vec& x0, const DescentOptions& opt) {
    DescentTrace trace;
    Vec x = x0;

    auto record = [&](const Vec& pg) {
        trace.iterates.push_back(x);
        trace.objective_values.push_back(objective(x));
        trace.gradient_norms.push_back(pg.norm());
    };

    for (int iter = 0; iter <= opt.max_iter; ++iter) {
        const Vec g = grad(x);
        const Vec pg = projector.apply(g);
        // beta = g^T P g equals ||P g||^2; the norm form keeps full relative
        // precision when ||P g|| << ||g||, where the inner product is pure
        // cancellation noise. The inner product still serves as a projector
        // sanity check.
        if (g.dot(pg) < -1e-12 * std::max(1.0, g.squaredNorm()))
            throw std::runtime_error("projection produced a negative curvature value beta");
        record(pg);

        const double pg_norm = pg.norm();
        Vec d;
        double slope;  // g . d
        if (pg_norm > 0.0 && opt.normalize_direction) {
            d = -pg / pg_norm;
            slope = -pg_norm;
        } else {
            d = -pg;
            slope = -pg_norm * pg_norm;
        }
        if (std::abs(slope) <= opt.tol) {
            trace.termination = Termination::Converged;
            return trace;
        }
        if (iter == opt.max_iter) break;

        // trial point with A x = b restored exactly: rounding in the projected
        // direction would otherwise accumulate into feasibility drift
        auto advance = [&](double alpha) {
            const Vec xt = x + alpha * d;
            const Vec restored = xt + projector.range_component(x0 - xt);
            if (positive_domain && restored.minCoeff() <= 0.0) return xt;
            return restored;
        };

        double alpha = opt.step.alpha;
        bool boundary_limited = false;
        if (positive_domain) {
            // shrink until the trial point stays strictly inside the orthant
            int guard = 0;
            while ((x + alpha * d).minCoeff() <= 0.0) {
                alpha *= opt.step.shrink;
                if (++guard > 200) {
                    boundary_limited = true;
                    break;
                }
            }
        }
        if (boundary_limited) {
            trace.termination = Termination::StalledOnBoundary;
            return trace;
        }
        if (opt.step.kind == StepRule::Kind::Backtracking) {
            const double f0 = trace.objective_values.back();
            const double merit_slope = merit_gradient ? merit_gradient(x).dot(d) : slope;
            int guard = 0;
            bool exhausted = false;
            while (objective(advance(alpha)) > f0 + opt.step.armijo_c * alpha * merit_slope) {
                alpha *= opt.step.shrink;
                if (++guard > 200) {
                    exhausted = true;
                    break;
                }
            }
            if (exhausted) {
                // no representable decrease exists along d: the objective's
                // floating-point resolution floor, not a mathematical stall
                trace.termination = Termination::Converged;
                return trace;
            }
            // probe one more shrink: when the accepted step is about twice the
            // ideal one the iterates oscillate across the minimizer and only
            // the Armijo margin makes progress; the half step lands near it
            if (objective(advance(alpha * opt.step.shrink)) < objective(advance(alpha)))
                alpha *= opt.step.shrink;
        }
        x = advance(alpha);
    }
    trace.termination = Termination::MaxIterations;
    return trace;
}

DescentTrace projected_descent(const ProjectedProblem& problem, const Vec& x0,
                               const DescentOptions& opt) {
    if (!problem.objective || !problem.gradient)
        throw std::invalid_argument("problem requires objective and gradient callables");
    if (problem.constraints.rows() > 0 && problem.constraints.cols() != x0.size())
        throw std::invalid_argument("constraint matrix width does not match x0");
    if (problem.constraints.rows() > 0) {
        const Vec residual = problem.constraints * x0 - problem.rhs;
        if (residual.cwiseAbs().maxCoeff() >
            1e-8 * (1.0 + problem.rhs.cwiseAbs().maxCoeff()))
            throw std::invalid_argument("x0 is infeasible: ||A x0 - b|| too large");
    }
    if (problem.positive_domain && x0.minCoeff() <= 0.0)
        throw std::invalid_argument("x0 must be strictly positive for this problem");

    Mat constraints = problem.constraints;
    if (constraints.rows() == 0) constraints = Mat(0, x0.size());
    Projector projector(constraints);
    return descent_loop(problem.objective, problem.gradient, nullptr, projector,
                        problem.positive_domain, x0, opt);
}

DescentTrace projected_simultaneous_descent(const CrnGame& game, const Mat& conservation,
                                            const Vec& x0, const DescentOptions& opt) {
    if (x0.size() != game.players())
        throw std::invalid_argument("x0 dimension does not match the game");
    if (x0.minCoeff() <= 0.0) throw std::invalid_argument("x0 must be strictly positive");
    Mat constraints = conservation;
    if (constraints.rows() == 0) constraints = Mat(0, x0.size());
    if (constraints.cols() != x0.size())
        throw std::invalid_argument("conservation matrix width does not match x0");
    Projector projector(constraints);

    // entropy is the Lyapunov function of the flow; it serves as the merit
    // function for backtracking
    auto objective = [&game](const Vec& w) { return entropy(game, w); };
    auto grad = [&game](const Vec& w) { return simultaneous_gradient(game, w); };
    auto merit_grad = [&game](const Vec& w) { return entropy_gradient(game, w); };
    return descent_loop(objective, grad, merit_grad, projector, /*positive_domain=*/true,
                        x0, opt);
}

}  // namespace crn
