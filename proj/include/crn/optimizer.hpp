#pragma once

#include "crn/game.hpp"
#include "crn/types.hpp"

#include <functional>
#include <vector>

namespace crn {

/// Orthogonal projector onto the null space of a constraint matrix,
/// P = I - A^T (A A^T)^{-1} A, held in factored form (rank-revealing QR of
/// A^T); redundant constraint rows are dropped and counted.
class Projector {
public:
    explicit Projector(const Mat& constraints);

    Vec apply(const Vec& x) const;     // P x without materializing P
    /// Component of v in range(A^T); applying it to x0 - x restores A x = b.
    Vec range_component(const Vec& v) const;
    Mat dense() const;                 // the dense projector
    int rank() const { return rank_; }
    int dropped_rows() const { return rows_ - rank_; }
    int dim() const { return n_; }

private:
    Mat range_q_;   // orthonormal basis of range(A^T), n x rank
    int n_ = 0;
    int rank_ = 0;
    int rows_ = 0;
};

Mat projection_matrix(const Mat& constraints);

/// min f(x) subject to A x = b, optionally restricted to the open positive
/// orthant. Callables must be pure.
struct ProjectedProblem {
    std::function<double(const Vec&)> objective;
    std::function<Vec(const Vec&)> gradient;
    Mat constraints;
    Vec rhs;
    bool positive_domain = false;
};

struct StepRule {
    enum class Kind { Fixed, Backtracking };
    Kind kind = Kind::Backtracking;
    double alpha = 1.0;       // fixed step, or initial trial step
    double shrink = 0.5;
    double armijo_c = 1e-4;

    static StepRule fixed(double a) { return {Kind::Fixed, a, 0.5, 1e-4}; }
    static StepRule backtracking(double shrink = 0.5, double c = 1e-4, double alpha0 = 1.0) {
        return {Kind::Backtracking, alpha0, shrink, c};
    }
};

enum class Termination { Converged, MaxIterations, StalledOnBoundary };

const char* to_string(Termination t);

struct DescentTrace {
    std::vector<Vec> iterates;             // includes the starting point
    std::vector<double> objective_values;
    std::vector<double> gradient_norms;    // ||P grad f|| per iterate
    Termination termination = Termination::MaxIterations;

    const Vec& last() const { return iterates.back(); }
    int iterations() const { return static_cast<int>(iterates.size()) - 1; }
};

struct DescentOptions {
    StepRule step = StepRule::backtracking();
    double tol = 1e-10;
    int max_iter = 100000;
    bool normalize_direction = true;   // d = -P grad / ||P grad||
};

/// Projected steepest descent: d = -P grad f / sqrt(beta) with
/// beta = grad^T P grad, stopping when |grad^T d| <= tol. Backtracking
/// enforces Armijo decrease; the positivity guard shrinks the step until the
/// iterate stays strictly positive and reports StalledOnBoundary if the step
/// underflows.
DescentTrace projected_descent(const ProjectedProblem& problem, const Vec& x0,
                               const DescentOptions& opt = {});

/// Each player descends its own loss: direction -P xi(x), the explicit-Euler
/// discretization of the reaction rate equation on the compatibility class.
/// Backtracking uses the entropy as merit function; stops when ||P xi|| <= tol.
DescentTrace projected_simultaneous_descent(const CrnGame& game, const Mat& conservation,
                                            const Vec& x0, const DescentOptions& opt = {});

}  // namespace crn
