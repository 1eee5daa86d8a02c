#pragma once

#include "crn/types.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crn {

/// One reversible reaction: stoichiometric vectors over the network's species
/// list plus forward/backward rate constants.
struct Reaction {
    IVec alpha;     // reactant coefficients, one per species
    IVec beta;      // product coefficients, one per species
    double k_fw = 1.0;
    double k_bw = 1.0;
};

/// A mass-action network of reversible reactions. Immutable after construction.
class ReactionNetwork {
public:
    ReactionNetwork(std::vector<std::string> species, std::vector<Reaction> reactions);

    int species_count() const { return static_cast<int>(species_.size()); }
    int reaction_count() const { return static_cast<int>(reactions_.size()); }
    const std::vector<std::string>& species() const { return species_; }
    const std::vector<Reaction>& reactions() const { return reactions_; }
    const Reaction& reaction(int r) const { return reactions_.at(r); }

    /// Index of a species name, -1 if absent.
    int species_index(std::string_view name) const;

private:
    std::vector<std::string> species_;
    std::vector<Reaction> reactions_;
};

/// Parses the reaction DSL. Each line is blank, a comment (`#`), or
///
///     <terms> <-> <terms> | kf=<positive real> kb=<positive real>
///
/// where a term is `[coeff] Name` (coefficient 1 when omitted), `+` separates
/// terms, and names match [A-Za-z_][A-Za-z0-9_]*. Species are numbered in
/// first-appearance order; duplicate names within one side sum their
/// coefficients. Trailing `#` comments are allowed.
ReactionNetwork parse_network(const std::string& text);

/// Canonical DSL text; parse_network(format_network(net)) reproduces net.
std::string format_network(const ReactionNetwork& net);

/// w^e with the convention 0^0 = 1, so boundary states are evaluable.
double monomial(const Vec& w, const IVec& exponents);

/// Species-by-reactions matrix whose column r is beta^r - alpha^r.
Mat wegscheider_matrix(const ReactionNetwork& net);

/// Rows form an integer basis of the left null space of the Wegscheider
/// matrix (exact rational elimination); row count = species - rank.
Mat conservation_basis(const ReactionNetwork& net);

/// Time derivative of the concentrations under mass action.
Vec mass_action_rate(const ReactionNetwork& net, const Vec& w);

struct DetailedBalanceReport {
    bool balanced = false;
    Vec residuals;           // |k_fw w^alpha - k_bw w^beta| per reaction
    Vec relative_residuals;  // residual / max(forward flux, backward flux)
    double max_relative() const {
        return relative_residuals.size() ? relative_residuals.maxCoeff() : 0.0;
    }
};

/// Detailed balance at w: every reaction's forward and backward fluxes agree
/// within tol, measured relative to the larger flux.
DetailedBalanceReport check_detailed_balance(const ReactionNetwork& net, const Vec& w,
                                             double tol);

/// Detailed-balance test for a first-order network given as a matrix of rate
/// constants a_ij >= 0 (zero diagonal): true iff the zero pattern is symmetric
/// and all cycle products agree.
bool first_order_detailed_balance(const Mat& rate_matrix);

/// Rate-constant matrix a_ij when every reaction is unimolecular (alpha and
/// beta are unit vectors); nullopt otherwise.
std::optional<Mat> first_order_rate_matrix(const ReactionNetwork& net);

}  // namespace crn
