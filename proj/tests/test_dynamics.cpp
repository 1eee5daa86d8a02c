#include "crn/dynamics.hpp"

#include "crn/presets.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace crn;

namespace {

Vec vec(std::initializer_list<double> v) {
    Vec out(static_cast<int>(v.size()));
    int i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

ReactionNetwork ab_net() { return parse_network("A <-> B | kf=1 kb=1"); }

}  // namespace

TEST_CASE("integrate: three-species network approaches (1,1,1)") {
    const auto net = preset_network("example3");
    const auto traj = integrate(net, vec({2, 0.5, 1.5}), 50.0, 1e-3);
    const Vec d50 = (traj.final_state() - Vec::Ones(3)).cwiseAbs();
    // the slow relaxation mode decays like exp(-0.111 t): still ~7e-4 at t=50
    CHECK(d50.maxCoeff() < 2e-3);
    CHECK(d50.maxCoeff() > 1e-4);
    const auto longer = integrate(net, vec({2, 0.5, 1.5}), 150.0, 1e-3);
    CHECK((longer.final_state() - Vec::Ones(3)).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("integrate: equilibrium is a fixed point") {
    const auto net = preset_network("example3");
    IntegrateOptions opt;
    opt.t_end = 5.0;
    opt.step = 1e-3;
    opt.equilibrium = Vec::Ones(3);
    const auto traj = integrate(net, Vec::Ones(3), opt);
    for (const Vec& w : traj.states)
        CHECK((w - Vec::Ones(3)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(traj.entropy.back() <= 1e-12);
}

TEST_CASE("integrate: isomerization converges to the balanced split") {
    const auto traj = integrate(ab_net(), vec({1.8, 0.2}), 20.0, 1e-3);
    CHECK((traj.final_state() - Vec::Ones(2)).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("integrate: step halving rescues positivity, and reports when it cannot") {
    // fast kinetics make the full RK4 step overshoot into negative values
    const auto stiff = parse_network("A <-> B | kf=10000 kb=1");
    IntegrateOptions opt;
    opt.t_end = 0.01;
    opt.step = 1e-3;
    const auto traj = integrate(stiff, vec({1.0, 1e-6}), opt);
    for (const Vec& w : traj.states) CHECK(w.minCoeff() > 0.0);

    opt.max_halvings = 0;
    CHECK_THROWS_WITH_AS(integrate(stiff, vec({1.0, 1e-6}), opt),
                         doctest::Contains("positivity"), std::runtime_error);
}

TEST_CASE("integrate: time grid is uniform and hits t_end") {
    const auto traj = integrate(ab_net(), vec({1.5, 0.5}), 1.0, 1e-3);
    REQUIRE(traj.size() == 1001);
    CHECK(traj.times.front() == 0.0);
    CHECK(traj.times.back() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("equilibrium_in_class: no conservation laws means one equilibrium") {
    const auto net = preset_network("example3");
    std::mt19937_64 rng(64);
    for (int t = 0; t < 5; ++t) {
        const Vec w0 = oracles::positive_state(Vec::Ones(3), rng);
        const Vec winf = equilibrium_in_class(net, w0);
        CHECK((winf - Vec::Ones(3)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("equilibrium_in_class: isomerization splits the conserved total") {
    const Vec winf = equilibrium_in_class(ab_net(), vec({1.8, 0.2}));
    CHECK((winf - Vec::Ones(2)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("equilibrium_in_class: combustion subsystem satisfies the balance relations") {
    const auto net = preset_network("example2");
    const Preset* p = find_preset("example2");
    REQUIRE(p);
    const Vec w = equilibrium_in_class(net, p->initial_state, 1e-12);

    auto at = [&](const char* name) { return w[net.species_index(name)]; };
    // unit rates: [O]^2 = [O2], [H]^2 = [H2], [O][CO] = [CO2],
    // [O][H] = [OH], [O][H]^2 = [H2O]
    CHECK(at("O") * at("O") == doctest::Approx(at("O2")).epsilon(1e-10));
    CHECK(at("H") * at("H") == doctest::Approx(at("H2")).epsilon(1e-10));
    CHECK(at("O") * at("CO") == doctest::Approx(at("CO2")).epsilon(1e-10));
    CHECK(at("O") * at("H") == doctest::Approx(at("OH")).epsilon(1e-10));
    CHECK(at("O") * at("H") * at("H") == doctest::Approx(at("H2O")).epsilon(1e-10));

    // class membership and detailed balance at tight tolerances
    const Mat basis = conservation_basis(net);
    CHECK((basis * (w - p->initial_state)).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(check_detailed_balance(net, w, 1e-10).balanced);
}

TEST_CASE("equilibrium_in_class: unique within a class from scattered seeds") {
    const auto net = preset_network("example2");
    const Preset* p = find_preset("example2");
    const Vec reference = equilibrium_in_class(net, p->initial_state);
    const Mat w_matrix = wegscheider_matrix(net);
    std::mt19937_64 rng(1848);
    int tested = 0;
    for (int t = 0; t < 40 && tested < 20; ++t) {
        // same compatibility class: shift along the Wegscheider range
        Vec u(w_matrix.cols());
        for (int i = 0; i < u.size(); ++i) u[i] = oracles::uniform(rng, -0.12, 0.12);
        const Vec seed = p->initial_state + w_matrix * u;
        if (seed.minCoeff() <= 0.05) continue;
        ++tested;
        const Vec winf = equilibrium_in_class(net, seed);
        CHECK((winf - reference).cwiseAbs().maxCoeff() <= 1e-8);
    }
    CHECK(tested == 20);
}

TEST_CASE("equilibrium_in_class: rejects networks without detailed balance") {
    CHECK_THROWS_AS(equilibrium_in_class(preset_network("cycle3"), Vec::Ones(3)),
                    NotDetailedBalanced);
}

TEST_CASE("relative entropy") {
    CHECK(relative_entropy(vec({1.3, 0.6}), vec({1.3, 0.6})) == 0.0);
    const double expected = 2.0 * std::log(2.0) - 1.0 + 0.5 * std::log(0.5) + 0.5;
    CHECK(relative_entropy(vec({2, 0.5}), vec({1, 1})) ==
          doctest::Approx(expected).epsilon(1e-14));
    CHECK_THROWS_AS(relative_entropy(vec({0, 1}), vec({1, 1})), std::invalid_argument);
    std::mt19937_64 rng(55);
    for (int t = 0; t < 500; ++t) {
        const Vec w = oracles::positive_state(Vec::Ones(4), rng);
        const Vec winf = oracles::positive_state(Vec::Ones(4), rng);
        CHECK(relative_entropy(w, winf) >= 0.0);
    }
}

TEST_CASE("dissipation") {
    SUBCASE("zero at the balanced state") {
        CHECK(dissipation(preset_network("example3"), Vec::Ones(3)) == 0.0);
    }
    SUBCASE("worked single-reaction value") {
        CHECK(dissipation(ab_net(), vec({2, 0.5})) ==
              doctest::Approx(1.5 * std::log(4.0)).epsilon(1e-14));
    }
    SUBCASE("nonnegative at random states") {
        std::mt19937_64 rng(66);
        const auto net = preset_network("example2");
        for (int t = 0; t < 500; ++t)
            CHECK(dissipation(net, oracles::positive_state(Vec::Ones(8), rng)) >= 0.0);
    }
    SUBCASE("equals the entropy decay rate along the flow") {
        const auto net = preset_network("example1");
        const Preset* p = find_preset("example1");
        IntegrateOptions opt;
        opt.t_end = 3.0;
        opt.step = 1e-3;
        opt.equilibrium = equilibrium_in_class(net, p->initial_state);
        const auto traj = integrate(net, p->initial_state, opt);
        const double h = traj.times[1] - traj.times[0];
        double d_max = 0.0;
        for (double d : traj.dissipation) d_max = std::max(d_max, d);
        // fourth-order central difference of E(t) against -D(t)
        for (int k = 2; k + 2 < traj.size(); k += 7) {
            const double dE = (-traj.entropy[k + 2] + 8.0 * traj.entropy[k + 1] -
                               8.0 * traj.entropy[k - 1] + traj.entropy[k - 2]) /
                              (12.0 * h);
            const double denom = std::max(traj.dissipation[k], 1e-4 * d_max);
            CHECK(std::abs(dE + traj.dissipation[k]) <= 1e-6 * denom);
        }
    }
}

TEST_CASE("rate certificate: isomerization constants, exactly") {
    const auto net = ab_net();
    const auto cert = rate_certificate(
        net, std::vector<Rational>{rational_from_decimal("1.8"), rational_from_decimal("0.2")});
    CHECK(cert.masses(0, 0) == 2.0);
    CHECK(cert.k_constants[0] == 1.0);
    CHECK(cert.l_constants[0] == 1.0);
    CHECK(cert.lambda_exact == Rational(1, 2));
    CHECK(cert.lambda == 0.5);
    CHECK(to_fraction_string(cert.lambda_exact) == "1/2");
    CHECK((cert.equilibrium - Vec::Ones(2)).cwiseAbs().maxCoeff() <= 1e-13);
    const double big_m = std::pow(std::sqrt(2.0) + 1.0, 2);
    CHECK(cert.big_m == doctest::Approx(big_m).epsilon(1e-14));
    CHECK(std::abs(cert.c1 - 1.0 / big_m) <= 1e-12);
}

TEST_CASE("rate certificate: dimerization constants") {
    const auto net = parse_network("2 A <-> B | kf=1 kb=1");
    const auto cert = rate_certificate(net, vec({2, 1}));
    CHECK(cert.masses(0, 0) == 2.0);  // 2/2 + 1/1
    CHECK(cert.lambda_exact == Rational(1, 2));
    CHECK(cert.k_constants[0] == 1.0);
    CHECK(cert.l_constants[0] == 2.0);
    CHECK(cert.lambda > 0.0);
    CHECK(cert.c1 > 0.0);
}

TEST_CASE("rate certificate: positivity of the constants is generic") {
    std::mt19937_64 rng(404);
    const auto net = parse_network("A + 2 B <-> 3 C | kf=1 kb=1");
    for (int t = 0; t < 25; ++t) {
        const Vec w0 = oracles::positive_state(Vec::Ones(3), rng);
        const auto cert = rate_certificate(net, w0);
        CHECK(cert.lambda > 0.0);
        CHECK(cert.c1 > 0.0);
        CHECK(cert.big_m > 0.0);
    }
}

TEST_CASE("rate certificate: input validation") {
    CHECK_THROWS_AS(rate_certificate(preset_network("example2"), Vec::Ones(8)),
                    std::invalid_argument);
    CHECK_THROWS_AS(rate_certificate(parse_network("A <-> B | kf=2 kb=2"), vec({1, 1})),
                    std::invalid_argument);
    // a species appearing on both sides breaks the reactant/product partition
    CHECK_THROWS_AS(rate_certificate(parse_network("A + B <-> 2 B | kf=1 kb=1"),
                                     vec({1, 1})),
                    std::invalid_argument);
    CHECK_THROWS_AS(rate_certificate(ab_net(), vec({1, -1})), std::invalid_argument);
}

TEST_CASE("lambda functional dominates the certified rate on the class") {
    std::mt19937_64 rng(2025);
    for (const char* name : {"ab", "a2b"}) {
        const Preset* p = find_preset(name);
        REQUIRE(p);
        const auto net = parse_network(p->crn_text);
        const auto cert = rate_certificate(net, p->initial_state);
        const Vec gamma =
            (net.reaction(0).beta - net.reaction(0).alpha).cast<double>();
        // the class is one-dimensional: w0 + xi * gamma inside the orthant
        double lo = -1e300, hi = 1e300;
        for (int i = 0; i < gamma.size(); ++i) {
            if (gamma[i] > 0.0) lo = std::max(lo, -p->initial_state[i] / gamma[i]);
            if (gamma[i] < 0.0) hi = std::min(hi, -p->initial_state[i] / gamma[i]);
        }
        double lambda_min = 1e300;
        for (int t = 0; t < 10000; ++t) {
            const double u = oracles::uniform(rng, 1e-6, 1.0 - 1e-6);
            const Vec w = p->initial_state + (lo + u * (hi - lo)) * gamma;
            lambda_min = std::min(lambda_min, lambda_functional(net, w));
        }
        CHECK(lambda_min >= cert.lambda);
    }
}

TEST_CASE("verify_exponential_decay") {
    const auto net = ab_net();
    const auto cert = rate_certificate(net, vec({1.8, 0.2}));
    IntegrateOptions opt;
    opt.t_end = 20.0;
    opt.step = 1e-3;
    opt.equilibrium = cert.equilibrium;
    const auto traj = integrate(net, vec({1.8, 0.2}), opt);

    SUBCASE("the certified bounds hold along the flow") {
        const auto check = verify_exponential_decay(traj, cert);
        CHECK(check.ok);
        CHECK(check.max_violation <= 0.0);
    }
    SUBCASE("entropy dominates the squared distance") {
        for (int k = 0; k < traj.size(); k += 37) {
            const double dist2 = (traj.states[k] - cert.equilibrium).squaredNorm();
            CHECK(traj.entropy[k] + 1e-12 >= cert.c1 * dist2);
        }
    }
    SUBCASE("an inflated rate is detected") {
        RateCertificate inflated = cert;
        inflated.lambda *= 10.0;
        const auto check = verify_exponential_decay(traj, inflated);
        CHECK_FALSE(check.ok);
        CHECK(check.first_violation_time >= 0.0);
        CHECK(check.max_violation > 0.0);
    }
    SUBCASE("a trajectory resting at equilibrium passes trivially") {
        RateCertificate at_eq = cert;
        at_eq.initial_state = cert.equilibrium;
        IntegrateOptions eq_opt = opt;
        eq_opt.t_end = 2.0;
        const auto eq_traj = integrate(net, cert.equilibrium, eq_opt);
        CHECK(verify_exponential_decay(eq_traj, at_eq).ok);
    }
    SUBCASE("mismatched trajectories are rejected") {
        const auto other = integrate(net, vec({0.5, 1.5}), 1.0, 1e-3);
        CHECK_THROWS_AS(verify_exponential_decay(other, cert), std::invalid_argument);
    }
}

TEST_CASE("property: entropy decreases and dissipation stays nonnegative") {
    for (const char* name : {"example1", "example2"}) {
        const auto net = preset_network(name);
        const Preset* p = find_preset(name);
        IntegrateOptions opt;
        opt.t_end = 10.0;
        opt.step = 1e-3;
        opt.equilibrium = equilibrium_in_class(net, p->initial_state);
        const auto traj = integrate(net, p->initial_state, opt);
        for (int k = 1; k < traj.size(); ++k) {
            CHECK(traj.entropy[k] <= traj.entropy[k - 1] + 1e-12);
            CHECK(traj.dissipation[k] >= 0.0);
        }
        const Mat basis = conservation_basis(net);
        const Vec ref = basis * p->initial_state;
        for (const Vec& w : traj.states)
            CHECK((basis * w - ref).cwiseAbs().maxCoeff() <= 1e-9);
    }
}
