#include "crn/network.hpp"

#include "crn/rational.hpp"
#include "crn/symmetry.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

namespace crn {

ReactionNetwork::ReactionNetwork(std::vector<std::string> species,
                                 std::vector<Reaction> reactions)
    : species_(std::move(species)), reactions_(std::move(reactions)) {
    if (species_.empty()) throw std::invalid_argument("species list is empty");
    std::unordered_map<std::string_view, int> seen;
    for (const auto& s : species_) {
        if (!seen.emplace(s, 1).second)
            throw std::invalid_argument("duplicate species name: " + s);
    }
    const int n = species_count();
    for (std::size_t r = 0; r < reactions_.size(); ++r) {
        const Reaction& rx = reactions_[r];
        if (rx.alpha.size() != n || rx.beta.size() != n)
            throw std::invalid_argument("reaction " + std::to_string(r) +
                                        ": stoichiometric vector length mismatch");
        if (rx.alpha.minCoeff() < 0 || rx.beta.minCoeff() < 0)
            throw std::invalid_argument("reaction " + std::to_string(r) +
                                        ": negative stoichiometric coefficient");
        if (rx.alpha == rx.beta)
            throw std::invalid_argument("reaction " + std::to_string(r) +
                                        ": alpha equals beta (reaction changes nothing)");
        if (!(rx.k_fw > 0.0) || !(rx.k_bw > 0.0))
            throw std::invalid_argument("reaction " + std::to_string(r) +
                                        ": rate constants must be positive");
    }
}

int ReactionNetwork::species_index(std::string_view name) const {
    for (std::size_t i = 0; i < species_.size(); ++i)
        if (species_[i] == name) return static_cast<int>(i);
    return -1;
}

// ---------------------------------------------------------------------------
// DSL parser
// ---------------------------------------------------------------------------

namespace {

struct LineScanner {
    std::string_view text;
    int line;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(message, line, static_cast<int>(pos) + 1);
    }
    void skip_space() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }
    bool at_end() {
        skip_space();
        return pos >= text.size();
    }
    bool try_literal(std::string_view lit) {
        skip_space();
        if (text.substr(pos, lit.size()) == lit) {
            pos += lit.size();
            return true;
        }
        return false;
    }
    void expect_literal(std::string_view lit, const std::string& what) {
        if (!try_literal(lit)) fail("expected " + what);
    }
    bool peek_digit() {
        skip_space();
        return pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]));
    }
    long parse_integer() {
        skip_space();
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start) fail("expected an integer");
        long value = 0;
        auto res = std::from_chars(text.data() + start, text.data() + pos, value);
        if (res.ec != std::errc{}) fail("integer out of range");
        return value;
    }
    std::string parse_name() {
        skip_space();
        if (pos >= text.size() ||
            !(std::isalpha(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            fail("expected a species name");
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        return std::string(text.substr(start, pos - start));
    }
    double parse_real() {
        skip_space();
        std::size_t start = pos;
        while (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) ||
                                     text[pos] == '.' || text[pos] == '+' || text[pos] == '-' ||
                                     text[pos] == 'e' || text[pos] == 'E'))
            ++pos;
        double value = 0.0;
        auto res = std::from_chars(text.data() + start, text.data() + pos, value);
        if (pos == start || res.ec != std::errc{} || res.ptr != text.data() + pos)
            fail("expected a number");
        return value;
    }
};

struct SpeciesTable {
    std::vector<std::string> names;
    std::unordered_map<std::string, int> index;

    int intern(const std::string& name) {
        auto it = index.find(name);
        if (it != index.end()) return it->second;
        int id = static_cast<int>(names.size());
        names.push_back(name);
        index.emplace(name, id);
        return id;
    }
};

// side := term ('+' term)*, term := [integer] name
std::map<int, long> parse_side(LineScanner& sc, SpeciesTable& table) {
    std::map<int, long> coeffs;
    while (true) {
        long coeff = 1;
        if (sc.peek_digit()) {
            coeff = sc.parse_integer();
            if (coeff <= 0) sc.fail("stoichiometric coefficient must be positive");
        }
        std::string name = sc.parse_name();
        coeffs[table.intern(name)] += coeff;
        if (!sc.try_literal("+")) break;
    }
    return coeffs;
}

}  // namespace

ReactionNetwork parse_network(const std::string& text) {
    if (text.empty()) throw ParseError("empty input", 1, 1);

    SpeciesTable table;
    struct RawReaction {
        std::map<int, long> alpha, beta;
        double k_fw, k_bw;
        int line;
    };
    std::vector<RawReaction> raw;

    std::istringstream stream(text);
    std::string line_text;
    int line_no = 0;
    while (std::getline(stream, line_text)) {
        ++line_no;
        if (auto hash = line_text.find('#'); hash != std::string::npos)
            line_text.erase(hash);
        LineScanner sc{line_text, line_no};
        if (sc.at_end()) continue;

        RawReaction rx;
        rx.line = line_no;
        rx.alpha = parse_side(sc, table);
        sc.expect_literal("<->", "'<->'");
        rx.beta = parse_side(sc, table);
        sc.expect_literal("|", "'|'");
        sc.expect_literal("kf", "'kf='");
        sc.expect_literal("=", "'kf='");
        rx.k_fw = sc.parse_real();
        sc.expect_literal("kb", "'kb='");
        sc.expect_literal("=", "'kb='");
        rx.k_bw = sc.parse_real();
        if (!sc.at_end()) sc.fail("unexpected trailing input");
        if (!(rx.k_fw > 0.0)) throw ParseError("kf must be positive", line_no, 1);
        if (!(rx.k_bw > 0.0)) throw ParseError("kb must be positive", line_no, 1);
        raw.push_back(std::move(rx));
    }
    if (raw.empty()) throw ParseError("no reactions found", line_no ? line_no : 1, 1);

    const int n = static_cast<int>(table.names.size());
    std::vector<Reaction> reactions;
    reactions.reserve(raw.size());
    for (const auto& rx : raw) {
        Reaction r;
        r.alpha = IVec::Zero(n);
        r.beta = IVec::Zero(n);
        for (auto [s, c] : rx.alpha) r.alpha[s] = static_cast<int>(c);
        for (auto [s, c] : rx.beta) r.beta[s] = static_cast<int>(c);
        r.k_fw = rx.k_fw;
        r.k_bw = rx.k_bw;
        if (r.alpha == r.beta) throw ParseError("alpha equals beta", rx.line, 1);
        reactions.push_back(std::move(r));
    }
    return ReactionNetwork(std::move(table.names), std::move(reactions));
}

namespace {

std::string shortest_double(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

void format_side(std::ostream& out, const ReactionNetwork& net, const IVec& coeffs) {
    bool first = true;
    for (int i = 0; i < coeffs.size(); ++i) {
        if (coeffs[i] == 0) continue;
        if (!first) out << " + ";
        if (coeffs[i] != 1) out << coeffs[i] << ' ';
        out << net.species()[i];
        first = false;
    }
}

}  // namespace

std::string format_network(const ReactionNetwork& net) {
    std::ostringstream out;
    for (const Reaction& r : net.reactions()) {
        format_side(out, net, r.alpha);
        out << " <-> ";
        format_side(out, net, r.beta);
        out << " | kf=" << shortest_double(r.k_fw) << " kb=" << shortest_double(r.k_bw)
            << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Stoichiometry
// ---------------------------------------------------------------------------

double monomial(const Vec& w, const IVec& exponents) {
    double value = 1.0;
    for (int i = 0; i < exponents.size(); ++i) {
        const int e = exponents[i];
        if (e == 0) continue;  // 0^0 = 1
        value *= std::pow(w[i], e);
    }
    return value;
}

Mat wegscheider_matrix(const ReactionNetwork& net) {
    Mat w(net.species_count(), net.reaction_count());
    for (int r = 0; r < net.reaction_count(); ++r)
        w.col(r) = (net.reaction(r).beta - net.reaction(r).alpha).cast<double>();
    return w;
}

namespace {

// Basis of { q : q^T W = 0 } by exact rational elimination on W^T. Rows are
// scaled to primitive integer vectors with positive leading entry.
std::vector<std::vector<Rational>> rational_left_nullspace(const ReactionNetwork& net) {
    const int rows = net.reaction_count();   // equations: one per reaction
    const int cols = net.species_count();
    std::vector<std::vector<Rational>> m(rows, std::vector<Rational>(cols));
    for (int r = 0; r < rows; ++r)
        for (int k = 0; k < cols; ++k)
            m[r][k] = net.reaction(r).beta[k] - net.reaction(r).alpha[k];

    std::vector<int> pivot_col;
    int lead = 0;
    for (int r = 0; r < rows && lead < cols; ++r) {
        int p = r;
        while (p < rows && m[p][lead] == 0) ++p;
        if (p == rows) {
            --r;
            ++lead;
            continue;
        }
        std::swap(m[p], m[r]);
        const Rational inv = m[r][lead];
        for (int k = lead; k < cols; ++k) m[r][k] /= inv;
        for (int i = 0; i < rows; ++i) {
            if (i == r || m[i][lead] == 0) continue;
            const Rational f = m[i][lead];
            for (int k = lead; k < cols; ++k) m[i][k] -= f * m[r][k];
        }
        pivot_col.push_back(lead);
        ++lead;
    }

    std::vector<bool> is_pivot(cols, false);
    for (int c : pivot_col) is_pivot[c] = true;

    std::vector<std::vector<Rational>> basis;
    for (int free = 0; free < cols; ++free) {
        if (is_pivot[free]) continue;
        std::vector<Rational> v(cols, Rational(0));
        v[free] = 1;
        for (std::size_t r = 0; r < pivot_col.size(); ++r) v[pivot_col[r]] = -m[r][free];
        // clear denominators, divide by gcd, make the first nonzero positive
        boost::multiprecision::cpp_int lcm = 1;
        for (const auto& q : v) lcm = boost::multiprecision::lcm(lcm, denominator(q));
        boost::multiprecision::cpp_int g = 0;
        std::vector<boost::multiprecision::cpp_int> ints(cols);
        for (int k = 0; k < cols; ++k) {
            ints[k] = numerator(v[k]) * (lcm / denominator(v[k]));
            g = boost::multiprecision::gcd(g, ints[k]);
        }
        if (g == 0) g = 1;
        int sign = 1;
        for (int k = 0; k < cols; ++k) {
            if (ints[k] != 0) {
                sign = ints[k] > 0 ? 1 : -1;
                break;
            }
        }
        for (int k = 0; k < cols; ++k) v[k] = Rational(ints[k] * sign, g);
        basis.push_back(std::move(v));
    }
    return basis;
}

}  // namespace

Mat conservation_basis(const ReactionNetwork& net) {
    const auto basis = rational_left_nullspace(net);
    Mat out(static_cast<int>(basis.size()), net.species_count());
    for (std::size_t r = 0; r < basis.size(); ++r)
        for (int k = 0; k < net.species_count(); ++k)
            out(static_cast<int>(r), k) = to_double(basis[r][k]);
    return out;
}

Vec mass_action_rate(const ReactionNetwork& net, const Vec& w) {
    if (w.size() != net.species_count())
        throw std::invalid_argument("state dimension does not match species count");
    Vec rate = Vec::Zero(net.species_count());
    for (const Reaction& r : net.reactions()) {
        const double flux = r.k_fw * monomial(w, r.alpha) - r.k_bw * monomial(w, r.beta);
        rate += flux * (r.beta - r.alpha).cast<double>();
    }
    return rate;
}

DetailedBalanceReport check_detailed_balance(const ReactionNetwork& net, const Vec& w,
                                             double tol) {
    if (w.size() != net.species_count())
        throw std::invalid_argument("state dimension does not match species count");
    if (w.minCoeff() <= 0.0)
        throw std::invalid_argument("detailed-balance check requires a strictly positive state");
    DetailedBalanceReport report;
    report.residuals = Vec::Zero(net.reaction_count());
    report.relative_residuals = Vec::Zero(net.reaction_count());
    report.balanced = true;
    for (int r = 0; r < net.reaction_count(); ++r) {
        const Reaction& rx = net.reaction(r);
        const double fwd = rx.k_fw * monomial(w, rx.alpha);
        const double bwd = rx.k_bw * monomial(w, rx.beta);
        report.residuals[r] = std::abs(fwd - bwd);
        report.relative_residuals[r] = report.residuals[r] / std::max(fwd, bwd);
        if (report.relative_residuals[r] > tol) report.balanced = false;
    }
    return report;
}

bool first_order_detailed_balance(const Mat& rate_matrix) {
    if (rate_matrix.rows() != rate_matrix.cols())
        throw std::invalid_argument("rate matrix must be square");
    if (rate_matrix.size() > 0 && rate_matrix.minCoeff() < 0.0)
        throw std::invalid_argument("rate constants must be nonnegative");
    return is_symmetrizable(rate_matrix).symmetrizable();
}

std::optional<Mat> first_order_rate_matrix(const ReactionNetwork& net) {
    const int n = net.species_count();
    Mat a = Mat::Zero(n, n);
    for (const Reaction& r : net.reactions()) {
        if (r.alpha.sum() != 1 || r.beta.sum() != 1 || r.alpha.maxCoeff() != 1 ||
            r.beta.maxCoeff() != 1)
            return std::nullopt;
        int from = 0, to = 0;
        r.alpha.maxCoeff(&from);
        r.beta.maxCoeff(&to);
        a(from, to) += r.k_fw;
        a(to, from) += r.k_bw;
    }
    return a;
}

}  // namespace crn
