#pragma once

#include "crn/types.hpp"

#include <functional>
#include <vector>

namespace crn {

enum class SymmetryVerdict { ExactSymmetric, Symmetrizable, NotSymmetrizable };

/// Evidence for a NotSymmetrizable verdict, re-checkable against the input.
struct SymmetrizerWitness {
    enum class Kind { None, ZeroPattern, CycleProduct, MixedSign };
    Kind kind = Kind::None;
    int i = -1;
    int j = -1;                // ZeroPattern / MixedSign entry pair
    std::vector<int> cycle;    // CycleProduct: i1 -> i2 -> ... -> ik -> i1
    double forward_product = 0.0;
    double backward_product = 0.0;
};

struct SymmetrizerResult {
    SymmetryVerdict verdict = SymmetryVerdict::NotSymmetrizable;
    Vec weights;               // positive diagonal d with diag(d) A symmetric
    SymmetrizerWitness witness;

    bool symmetrizable() const { return verdict != SymmetryVerdict::NotSymmetrizable; }
};

/// Decides whether A admits a positive diagonal symmetrizer. Zero-pattern
/// symmetry is checked entrywise (|a| <= tol * max|A| counts as zero); the
/// cycle condition is enforced by propagating weights over a spanning forest
/// of the support graph and verifying every pair afterwards. A symmetrizer
/// that exists only with mixed signs yields NotSymmetrizable with a sign
/// witness.
SymmetrizerResult is_symmetrizable(const Mat& a, double tol = 1e-10);

/// An n-player differentiable game. `loss` is mandatory; `gradient` and
/// `hessian_block` are optional analytic derivatives (central finite
/// differences are used when absent). `in_domain` guards path integrals.
struct DifferentiableGame {
    std::vector<int> dims;
    std::function<double(int, const Vec&)> loss;
    std::function<Vec(int, const Vec&)> gradient;
    std::function<Mat(int, int, const Vec&)> hessian_block;
    std::function<bool(const Vec&)> in_domain;

    int players() const { return static_cast<int>(dims.size()); }
    int total_dim() const;
    int offset(int player) const;  // first coordinate of player's block

    bool has_analytic_hessian() const { return static_cast<bool>(hessian_block); }

    /// grad of player i's loss with respect to its own block.
    Vec player_gradient(int i, const Vec& w) const;
    /// d^2 l_i / dw_i dw_j block (dims[i] x dims[j]).
    Mat player_hessian_block(int i, int j, const Vec& w) const;
    /// Full game Hessian with block (i,j) = d^2 l_i / dw_i dw_j.
    Mat game_hessian(const Vec& w) const;
};

enum class GameClass { ExactPotential, WeightedPotential, NotPotential, Inconclusive };

struct GameClassification {
    GameClass verdict = GameClass::Inconclusive;
    Vec weights;               // per-player, for (Exact|Weighted)Potential
    int violating_sample = -1;
    double violation = 0.0;    // relative size of the worst defect found
    SymmetrizerWitness witness;
};

/// Samples the game Hessian and decides potentialness: exact when symmetric
/// everywhere, weighted when one positive weight vector (computed at the
/// first sample) symmetrizes the block structure at every sample. A
/// violating sample yields NotPotential when Hessians are analytic;
/// finite-difference Hessians report Inconclusive for marginal violations.
GameClassification classify_game(const DifferentiableGame& game,
                                 const std::vector<Vec>& sample_points,
                                 double tol = 1e-8);

/// Potential difference phi(z1) - phi(z0) = sum_i alpha_i int_0^1
/// z_i'(t) . grad_i l_i(z(t)) dt along the straight segment, by composite
/// Simpson quadrature. Throws if the path leaves the game's domain.
double potential_from_weights(const DifferentiableGame& game, const Vec& weights,
                              const Vec& z0, const Vec& z1, int quadrature_steps);

}  // namespace crn
