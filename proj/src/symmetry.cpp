#include "crn/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace crn {

namespace {

constexpr double kFdCube = 6.0554544523933429e-06;  // cbrt(machine epsilon)

double fd_step(double x) { return kFdCube * std::max(1.0, std::abs(x)); }

// Tree path i -> root as a list of vertices.
std::vector<int> path_to_root(int i, const std::vector<int>& parent) {
    std::vector<int> path{i};
    while (parent[path.back()] >= 0) path.push_back(parent[path.back()]);
    return path;
}

// Cycle witness for a failed consistency check on edge (i, j): walk i and j
// up to their lowest common ancestor in the spanning tree, then close with
// the (j, i) edge.
std::vector<int> cycle_through_edge(int i, int j, const std::vector<int>& parent) {
    auto pi = path_to_root(i, parent);
    auto pj = path_to_root(j, parent);
    std::vector<char> on_pi(parent.size(), 0);
    for (int v : pi) on_pi[v] = 1;
    int lca = -1;
    for (int v : pj) {
        if (on_pi[v]) {
            lca = v;
            break;
        }
    }
    std::vector<int> cycle;
    for (int v : pi) {
        cycle.push_back(v);
        if (v == lca) break;
    }
    std::vector<int> down;
    for (int v : pj) {
        if (v == lca) break;
        down.push_back(v);
    }
    std::reverse(down.begin(), down.end());
    cycle.insert(cycle.end(), down.begin(), down.end());
    return cycle;  // i, ..., lca, ..., j; the closing edge is (j, i)
}

double cycle_product(const Mat& a, const std::vector<int>& cycle, bool forward) {
    double p = 1.0;
    const int k = static_cast<int>(cycle.size());
    for (int s = 0; s < k; ++s) {
        int u = cycle[s], v = cycle[(s + 1) % k];
        p *= forward ? a(u, v) : a(v, u);
    }
    return p;
}

}  // namespace

SymmetrizerResult is_symmetrizable(const Mat& a, double tol) {
    if (a.rows() != a.cols()) throw std::invalid_argument("matrix must be square");
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    const int n = static_cast<int>(a.rows());

    SymmetrizerResult result;
    if (n == 0) {
        result.verdict = SymmetryVerdict::ExactSymmetric;
        return result;
    }

    const double scale = a.cwiseAbs().maxCoeff();
    const double zero_tol = tol * scale;
    auto is_zero = [&](double x) { return std::abs(x) <= zero_tol; };

    // condition 1: zero-pattern symmetry
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (is_zero(a(i, j)) != is_zero(a(j, i))) {
                result.verdict = SymmetryVerdict::NotSymmetrizable;
                result.witness.kind = SymmetrizerWitness::Kind::ZeroPattern;
                result.witness.i = i;
                result.witness.j = j;
                return result;
            }
        }
    }

    if (scale == 0.0 || (a - a.transpose()).cwiseAbs().maxCoeff() <= zero_tol) {
        result.verdict = SymmetryVerdict::ExactSymmetric;
        result.weights = Vec::Ones(n);
        return result;
    }

    // weight propagation over a spanning forest of the support graph
    Vec d = Vec::Zero(n);
    std::vector<int> parent(n, -1), component(n, -1);
    int comp_count = 0;
    for (int root = 0; root < n; ++root) {
        if (component[root] >= 0) continue;
        component[root] = comp_count;
        d[root] = 1.0;
        std::deque<int> queue{root};
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (int v = 0; v < n; ++v) {
                if (v == u || component[v] >= 0 || is_zero(a(u, v))) continue;
                component[v] = comp_count;
                parent[v] = u;
                d[v] = d[u] * a(u, v) / a(v, u);
                queue.push_back(v);
            }
        }
        ++comp_count;
    }

    // negative weight: a symmetrizer exists at best with mixed signs
    for (int v = 0; v < n; ++v) {
        if (d[v] < 0.0) {
            result.verdict = SymmetryVerdict::NotSymmetrizable;
            result.witness.kind = SymmetrizerWitness::Kind::MixedSign;
            result.witness.i = parent[v];
            result.witness.j = v;
            return result;
        }
    }

    // normalize each component so its smallest weight is 1
    for (int c = 0; c < comp_count; ++c) {
        double dmin = std::numeric_limits<double>::infinity();
        for (int v = 0; v < n; ++v)
            if (component[v] == c) dmin = std::min(dmin, d[v]);
        for (int v = 0; v < n; ++v)
            if (component[v] == c) d[v] /= dmin;
    }

    // verify every support pair; a failure maps back to a cycle witness
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (is_zero(a(i, j))) continue;
            if (component[i] != component[j]) continue;  // cannot happen on support pairs
            const double lhs = d[i] * a(i, j);
            const double rhs = d[j] * a(j, i);
            if (std::abs(lhs - rhs) > tol * std::max({std::abs(lhs), std::abs(rhs), scale})) {
                result.verdict = SymmetryVerdict::NotSymmetrizable;
                result.witness.kind = SymmetrizerWitness::Kind::CycleProduct;
                result.witness.i = i;
                result.witness.j = j;
                result.witness.cycle = cycle_through_edge(i, j, parent);
                result.witness.forward_product = cycle_product(a, result.witness.cycle, true);
                result.witness.backward_product = cycle_product(a, result.witness.cycle, false);
                return result;
            }
        }
    }

    result.verdict = SymmetryVerdict::Symmetrizable;
    result.weights = d;
    return result;
}

// ---------------------------------------------------------------------------
// Differentiable games
// ---------------------------------------------------------------------------

int DifferentiableGame::total_dim() const {
    return std::accumulate(dims.begin(), dims.end(), 0);
}

int DifferentiableGame::offset(int player) const {
    return std::accumulate(dims.begin(), dims.begin() + player, 0);
}

Vec DifferentiableGame::player_gradient(int i, const Vec& w) const {
    if (gradient) return gradient(i, w);
    const int off = offset(i);
    Vec g(dims[i]);
    Vec wp = w;
    for (int k = 0; k < dims[i]; ++k) {
        const double h = fd_step(w[off + k]);
        wp[off + k] = w[off + k] + h;
        const double fp = loss(i, wp);
        wp[off + k] = w[off + k] - h;
        const double fm = loss(i, wp);
        wp[off + k] = w[off + k];
        g[k] = (fp - fm) / (2.0 * h);
    }
    return g;
}

Mat DifferentiableGame::player_hessian_block(int i, int j, const Vec& w) const {
    if (hessian_block) return hessian_block(i, j, w);
    const int oi = offset(i), oj = offset(j);
    Mat h(dims[i], dims[j]);
    Vec wp = w;
    for (int p = 0; p < dims[i]; ++p) {
        for (int q = 0; q < dims[j]; ++q) {
            const double hp = fd_step(w[oi + p]);
            const double hq = fd_step(w[oj + q]);
            if (oi + p == oj + q) {
                const double f0 = loss(i, w);
                wp[oi + p] = w[oi + p] + hp;
                const double fp = loss(i, wp);
                wp[oi + p] = w[oi + p] - hp;
                const double fm = loss(i, wp);
                wp[oi + p] = w[oi + p];
                h(p, q) = (fp - 2.0 * f0 + fm) / (hp * hp);
            } else {
                double sum = 0.0;
                for (int sp : {+1, -1}) {
                    for (int sq : {+1, -1}) {
                        wp[oi + p] = w[oi + p] + sp * hp;
                        wp[oj + q] = w[oj + q] + sq * hq;
                        sum += sp * sq * loss(i, wp);
                        wp[oi + p] = w[oi + p];
                        wp[oj + q] = w[oj + q];
                    }
                }
                h(p, q) = sum / (4.0 * hp * hq);
            }
        }
    }
    return h;
}

Mat DifferentiableGame::game_hessian(const Vec& w) const {
    const int d = total_dim();
    Mat h(d, d);
    for (int i = 0; i < players(); ++i)
        for (int j = 0; j < players(); ++j)
            h.block(offset(i), offset(j), dims[i], dims[j]) = player_hessian_block(i, j, w);
    return h;
}

namespace {

struct BlockView {
    const DifferentiableGame* game;
    Mat hessian;  // full game Hessian at one sample

    Mat block(int i, int j) const {
        return hessian.block(game->offset(i), game->offset(j), game->dims[i], game->dims[j]);
    }
};

// Largest defect of alpha_i H_ij = alpha_j H_ji^T over all player pairs,
// relative to the Hessian scale.
double weighted_defect(const BlockView& v, const Vec& alpha) {
    const int n = v.game->players();
    const double scale = std::max(v.hessian.cwiseAbs().maxCoeff(), 1e-300);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const Mat lhs = alpha[i] * v.block(i, j);
            const Mat rhs = alpha[j] * v.block(j, i).transpose();
            worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff() /
                                        (scale * alpha.maxCoeff()));
        }
    }
    return worst;
}

}  // namespace

GameClassification classify_game(const DifferentiableGame& game,
                                 const std::vector<Vec>& sample_points, double tol) {
    if (sample_points.empty()) throw std::invalid_argument("no sample points");
    const int n = game.players();
    const int d = game.total_dim();
    for (const Vec& w : sample_points)
        if (w.size() != d)
            throw std::invalid_argument("sample dimension does not match the game");

    GameClassification out;
    if (n == 1) {
        out.verdict = GameClass::ExactPotential;
        out.weights = Vec::Ones(1);
        return out;
    }

    std::vector<BlockView> views;
    views.reserve(sample_points.size());
    for (const Vec& w : sample_points)
        views.push_back({&game, game.game_hessian(w)});

    // exact case: the full Hessian is symmetric at every sample
    bool exact = true;
    for (std::size_t s = 0; s < views.size() && exact; ++s) {
        const Mat& h = views[s].hessian;
        const double scale = std::max(h.cwiseAbs().maxCoeff(), 1e-300);
        if ((h - h.transpose()).cwiseAbs().maxCoeff() > tol * scale) exact = false;
    }
    if (exact) {
        out.verdict = GameClass::ExactPotential;
        out.weights = Vec::Ones(n);
        return out;
    }

    // marginal violations from finite-difference Hessians are inconclusive
    const double hard_tol = game.has_analytic_hessian() ? tol : 1000.0 * tol;
    auto verdict_for = [&](double violation) {
        return violation > hard_tol ? GameClass::NotPotential : GameClass::Inconclusive;
    };

    // weights from the first sample: propagate ratios over the coupling graph
    const BlockView& first = views.front();
    auto coupled = [&](const BlockView& v, int i, int j) {
        const double scale = std::max(v.hessian.cwiseAbs().maxCoeff(), 1e-300);
        return v.block(i, j).cwiseAbs().maxCoeff() > tol * scale;
    };

    // zero-pattern of the coupling must be symmetric at every sample
    for (std::size_t s = 0; s < views.size(); ++s) {
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (coupled(views[s], i, j) != coupled(views[s], j, i)) {
                    out.verdict = GameClass::NotPotential;  // structurally one-sided
                    out.violating_sample = static_cast<int>(s);
                    out.witness.kind = SymmetrizerWitness::Kind::ZeroPattern;
                    out.witness.i = i;
                    out.witness.j = j;
                    return out;
                }
            }
        }
    }

    Vec alpha = Vec::Zero(n);
    std::vector<int> parent(n, -1);
    for (int root = 0; root < n; ++root) {
        if (alpha[root] != 0.0) continue;
        alpha[root] = 1.0;
        std::deque<int> queue{root};
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (int v = 0; v < n; ++v) {
                if (v == u || alpha[v] != 0.0) continue;
                if (!coupled(first, u, v)) continue;
                const Mat huv = first.block(u, v);
                const Mat hvut = first.block(v, u).transpose();
                int p = 0, q = 0;
                hvut.cwiseAbs().maxCoeff(&p, &q);
                // alpha_u H_uv = alpha_v H_vu^T at the dominant entry
                alpha[v] = alpha[u] * huv(p, q) / hvut(p, q);
                parent[v] = u;
                queue.push_back(v);
            }
        }
    }

    for (int v = 0; v < n; ++v) {
        if (alpha[v] < 0.0) {
            out.verdict = GameClass::NotPotential;  // only mixed-sign weights exist
            out.violating_sample = 0;
            out.witness.kind = SymmetrizerWitness::Kind::MixedSign;
            out.witness.i = parent[v];
            out.witness.j = v;
            return out;
        }
    }
    alpha /= alpha.minCoeff();

    // verify the single weight vector at every sample
    for (std::size_t s = 0; s < views.size(); ++s) {
        const double defect = weighted_defect(views[s], alpha);
        if (defect > tol) {
            out.verdict = verdict_for(defect);
            out.violating_sample = static_cast<int>(s);
            out.violation = defect;
            return out;
        }
    }

    out.verdict = GameClass::WeightedPotential;
    out.weights = alpha;
    return out;
}

double potential_from_weights(const DifferentiableGame& game, const Vec& weights,
                              const Vec& z0, const Vec& z1, int quadrature_steps) {
    if (weights.size() != game.players())
        throw std::invalid_argument("one weight per player required");
    if (weights.minCoeff() <= 0.0) throw std::invalid_argument("weights must be positive");
    if (quadrature_steps < 2) throw std::invalid_argument("need at least 2 quadrature steps");

    const int intervals = quadrature_steps % 2 == 0 ? quadrature_steps : quadrature_steps + 1;
    const Vec delta = z1 - z0;

    auto integrand = [&](double t) {
        const Vec z = z0 + t * delta;
        if (game.in_domain && !game.in_domain(z))
            throw std::domain_error("path leaves the loss domain at t = " + std::to_string(t));
        double value = 0.0;
        for (int i = 0; i < game.players(); ++i) {
            const Vec gi = game.player_gradient(i, z);
            value += weights[i] * gi.dot(delta.segment(game.offset(i), game.dims[i]));
        }
        return value;
    };

    // composite Simpson
    const double h = 1.0 / intervals;
    double sum = integrand(0.0) + integrand(1.0);
    for (int k = 1; k < intervals; ++k) sum += (k % 2 ? 4.0 : 2.0) * integrand(k * h);
    return sum * h / 3.0;
}

}  // namespace crn
