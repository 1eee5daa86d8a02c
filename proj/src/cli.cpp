#include "crn/cli.hpp"

#include "crn/dynamics.hpp"
#include "crn/game.hpp"
#include "crn/io.hpp"
#include "crn/network.hpp"
#include "crn/optimizer.hpp"
#include "crn/presets.hpp"
#include "crn/symmetry.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

namespace crn {

namespace {

// 53-bit uniform in [0,1); independent of the standard library's
// distribution internals so that seeded reports are stable
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Vec sample_state_around(const Vec& ref, std::mt19937_64& rng) {
    Vec w(ref.size());
    for (int i = 0; i < ref.size(); ++i)
        w[i] = ref[i] * std::exp(2.0 * uniform01(rng) - 1.0);
    return w;
}

struct LoadedProblem {
    ReactionNetwork net;
    Vec init;
    const Preset* preset = nullptr;  // set when `network` named a preset
};

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) parts.push_back(item);
    return parts;
}

Vec parse_init_list(const std::string& text, int n) {
    const auto parts = split_commas(text);
    if (static_cast<int>(parts.size()) != n)
        throw std::invalid_argument("--init has " + std::to_string(parts.size()) +
                                    " components, network has " + std::to_string(n) +
                                    " species");
    Vec w(n);
    for (int i = 0; i < n; ++i) {
        std::size_t used = 0;
        w[i] = std::stod(parts[i], &used);
        if (used != parts[i].size())
            throw std::invalid_argument("bad --init component: " + parts[i]);
        if (!(w[i] > 0.0)) throw std::invalid_argument("--init components must be positive");
    }
    return w;
}

LoadedProblem load_problem(const RunConfig& cfg) {
    if (cfg.network.empty())
        throw std::invalid_argument("--network is required (file path or preset name)");
    LoadedProblem out = [&]() -> LoadedProblem {
        if (const Preset* p = find_preset(cfg.network))
            return {parse_network(p->crn_text), p->initial_state, p};
        std::ifstream file(cfg.network);
        if (!file) throw std::invalid_argument("cannot open network file: " + cfg.network);
        std::ostringstream text;
        text << file.rdbuf();
        return {parse_network(text.str()), Vec(), nullptr};
    }();

    const bool want_preset_init =
        cfg.init.empty() || cfg.init == "preset" || cfg.init == "default";
    if (want_preset_init) {
        if (!out.preset)
            throw std::invalid_argument("--init is required when --network is a file");
        out.init = out.preset->initial_state;
    } else {
        out.init = parse_init_list(cfg.init, out.net.species_count());
    }
    return out;
}

void emit_report(const Json& report, const RunConfig& cfg, std::ostream& out) {
    if (cfg.out_json.empty()) {
        out << report.dump(2) << '\n';
        return;
    }
    std::ofstream file(cfg.out_json);
    if (!file) throw std::runtime_error("cannot write " + cfg.out_json);
    file << report.dump(2) << '\n';
}

Json witness_to_json(const SymmetrizerWitness& w) {
    Json j;
    switch (w.kind) {
        case SymmetrizerWitness::Kind::ZeroPattern:
            j["kind"] = "zero_pattern";
            j["pair"] = {w.i, w.j};
            break;
        case SymmetrizerWitness::Kind::CycleProduct:
            j["kind"] = "cycle_product";
            j["cycle"] = w.cycle;
            j["forward_product"] = w.forward_product;
            j["backward_product"] = w.backward_product;
            break;
        case SymmetrizerWitness::Kind::MixedSign:
            j["kind"] = "mixed_sign";
            j["pair"] = {w.i, w.j};
            break;
        case SymmetrizerWitness::Kind::None:
            j["kind"] = "none";
            break;
    }
    return j;
}

const char* verdict_name(SymmetryVerdict v) {
    switch (v) {
        case SymmetryVerdict::ExactSymmetric: return "ExactSymmetric";
        case SymmetryVerdict::Symmetrizable: return "Symmetrizable";
        case SymmetryVerdict::NotSymmetrizable: return "NotSymmetrizable";
    }
    return "?";
}

// ---------------------------------------------------------------------------

int run_check(const RunConfig& cfg, std::ostream& out) {
    const LoadedProblem problem = load_problem(cfg);
    const ReactionNetwork& net = problem.net;

    Json report;
    report["command"] = "check";
    report["network"] = network_to_json(net);
    report["conservation_basis"] = matrix_to_json(conservation_basis(net));
    report["seed"] = cfg.seed;

    // first-order networks also get the rate-matrix characterization
    if (auto rates = first_order_rate_matrix(net)) {
        const auto sym = is_symmetrizable(*rates);
        Json fo;
        fo["rate_matrix"] = matrix_to_json(*rates);
        fo["detailed_balance"] = sym.symmetrizable();
        if (!sym.symmetrizable()) fo["witness"] = witness_to_json(sym.witness);
        report["first_order"] = std::move(fo);
    }

    bool generalized_potential = true;
    try {
        const Vec winf = equilibrium_in_class(net, problem.init, 1e-12);
        const auto db = check_detailed_balance(net, winf, std::max(cfg.tol, 1e-10));
        report["equilibrium"] = vector_to_json(winf);
        report["detailed_balance"] = db.balanced;
        report["max_flux_residual"] = db.max_relative();

        const CrnGame game(net, winf);
        report["kappa"] = vector_to_json(game.kappas());

        std::mt19937_64 rng(cfg.seed);
        double max_residual = 0.0, sum_residual = 0.0;
        int symmetrizable_samples = 0;
        std::string first_hessian_verdict;
        std::ofstream trace_csv;
        if (!cfg.out_csv.empty()) {
            trace_csv.open(cfg.out_csv);
            if (!trace_csv) throw std::runtime_error("cannot write " + cfg.out_csv);
            for (const auto& s : net.species()) trace_csv << s << ',';
            for (const auto& s : net.species()) trace_csv << "xi_" << s << ',';
            trace_csv << "entropy,residual\n";
        }
        for (int s = 0; s < cfg.samples; ++s) {
            const Vec w = sample_state_around(winf, rng);
            const double residual = verify_generalized_potential(game, w);
            max_residual = std::max(max_residual, residual);
            sum_residual += residual;
            const auto sym = is_symmetrizable(game_hessian(game, w), 1e-8);
            if (sym.symmetrizable()) ++symmetrizable_samples;
            if (s == 0) first_hessian_verdict = verdict_name(sym.verdict);
            if (trace_csv.is_open()) {
                const Vec xi = simultaneous_gradient(game, w);
                for (int i = 0; i < w.size(); ++i)
                    trace_csv << format_double(w[i]) << ',';
                for (int i = 0; i < xi.size(); ++i)
                    trace_csv << format_double(xi[i]) << ',';
                trace_csv << format_double(entropy(game, w)) << ','
                          << format_double(residual) << '\n';
            }
        }
        report["generalized_potential_residual"] = {
            {"samples", cfg.samples},
            {"max", max_residual},
            {"mean", cfg.samples ? sum_residual / cfg.samples : 0.0}};
        report["game_hessian_symmetrizable_samples"] = symmetrizable_samples;
        report["game_hessian_first_verdict"] = first_hessian_verdict;
        if (max_residual > 1e-8) generalized_potential = false;

        // the path integral of grad E must reproduce the entropy difference
        const Vec z0 = sample_state_around(winf, rng);
        const Vec z1 = sample_state_around(winf, rng);
        const double via_path =
            generalized_potential_difference(game, z0, z1, cfg.quadrature_steps);
        const double direct = entropy(game, z1) - entropy(game, z0);
        report["path_integral_check"] = {{"quadrature_steps", cfg.quadrature_steps},
                                         {"error", std::abs(via_path - direct)}};
    } catch (const NotDetailedBalanced& e) {
        report["detailed_balance"] = false;
        report["reason"] = e.what();
        generalized_potential = false;
    }

    report["verdict"] =
        generalized_potential ? "generalized potential" : "not generalized potential";
    emit_report(report, cfg, out);
    return generalized_potential ? 0 : 2;
}

int run_simulate(const RunConfig& cfg, std::ostream& out) {
    const LoadedProblem problem = load_problem(cfg);
    const ReactionNetwork& net = problem.net;

    IntegrateOptions opt;
    opt.t_end = cfg.t_end;
    opt.step = cfg.step;
    try {
        opt.equilibrium = equilibrium_in_class(net, problem.init, 1e-12);
    } catch (const NotDetailedBalanced&) {
        // entropy column stays empty
    }
    const Trajectory traj = integrate(net, problem.init, opt);

    if (cfg.out_csv.empty()) {
        write_trajectory_csv(out, traj, net.species());
    } else {
        std::ofstream csv(cfg.out_csv);
        if (!csv) throw std::runtime_error("cannot write " + cfg.out_csv);
        write_trajectory_csv(csv, traj, net.species());
    }

    const Mat basis = conservation_basis(net);
    double drift = 0.0;
    if (basis.rows() > 0) {
        const Vec ref = basis * problem.init;
        for (const Vec& w : traj.states)
            drift = std::max(drift, (basis * w - ref).cwiseAbs().maxCoeff());
    }
    bool entropy_monotone = true;
    for (std::size_t k = 1; k < traj.entropy.size(); ++k)
        if (traj.entropy[k] > traj.entropy[k - 1] + 1e-12) entropy_monotone = false;

    Json report;
    report["command"] = "simulate";
    report["t_end"] = cfg.t_end;
    report["step"] = cfg.step;
    report["final_state"] = vector_to_json(traj.final_state());
    report["final_dissipation"] = traj.dissipation.back();
    if (traj.has_equilibrium()) {
        report["equilibrium"] = vector_to_json(traj.equilibrium);
        report["final_entropy"] = traj.entropy.back();
        report["entropy_monotone"] = entropy_monotone;
    }
    report["conservation_drift"] = drift;
    emit_report(report, cfg, out);
    return 0;
}

int run_equilibrate(const RunConfig& cfg, std::ostream& out) {
    const LoadedProblem problem = load_problem(cfg);
    const ReactionNetwork& net = problem.net;

    Json report;
    report["command"] = "equilibrate";
    try {
        const Vec winf = equilibrium_in_class(net, problem.init, std::min(cfg.tol, 1e-10));
        const Mat basis = conservation_basis(net);
        const auto db = check_detailed_balance(net, winf, 1e-10);
        report["equilibrium"] = vector_to_json(winf);
        report["detailed_balance"] = db.balanced;
        report["max_flux_residual"] = db.max_relative();
        report["class_residual"] =
            basis.rows() ? (basis * (winf - problem.init)).cwiseAbs().maxCoeff() : 0.0;
        const CrnGame game(net, winf);
        report["kappa"] = vector_to_json(game.kappas());
        emit_report(report, cfg, out);
        return 0;
    } catch (const NotDetailedBalanced& e) {
        report["detailed_balance"] = false;
        report["reason"] = e.what();
        report["verdict"] = "not detailed balanced";
        emit_report(report, cfg, out);
        return 2;
    }
}

int run_rate(const RunConfig& cfg, std::ostream& out) {
    const LoadedProblem problem = load_problem(cfg);
    const ReactionNetwork& net = problem.net;

    // exact decimal input for the rational lambda path
    std::vector<Rational> exact_init(net.species_count());
    const bool explicit_init =
        !(cfg.init.empty() || cfg.init == "preset" || cfg.init == "default");
    if (explicit_init) {
        const auto parts = split_commas(cfg.init);
        for (int i = 0; i < net.species_count(); ++i)
            exact_init[i] = rational_from_decimal(parts[i]);
    } else {
        for (int i = 0; i < net.species_count(); ++i)
            exact_init[i] = rational_from_decimal(format_double(problem.init[i]));
    }

    const RateCertificate cert = rate_certificate(net, exact_init);

    IntegrateOptions opt;
    opt.t_end = cfg.t_end;
    opt.step = cfg.step;
    opt.equilibrium = cert.equilibrium;
    const Trajectory traj = integrate(net, problem.init, opt);
    const DecayCheck decay = verify_exponential_decay(traj, cert);

    Json report;
    report["command"] = "rate";
    report["masses"] = matrix_to_json(cert.masses);
    report["k_constants"] = vector_to_json(cert.k_constants);
    report["l_constants"] = vector_to_json(cert.l_constants);
    report["lambda"] = cert.lambda;
    report["lambda_exact"] = to_fraction_string(cert.lambda_exact);
    report["big_m"] = cert.big_m;
    report["c1"] = cert.c1;
    report["equilibrium"] = vector_to_json(cert.equilibrium);
    report["decay_verified"] = decay.ok;
    report["max_violation"] = decay.max_violation;
    if (!decay.ok) report["first_violation_time"] = decay.first_violation_time;
    emit_report(report, cfg, out);
    return decay.ok ? 0 : 2;
}

int run_compare(const RunConfig& cfg, std::ostream& out) {
    if (cfg.descent != "potential" && cfg.descent != "simultaneous")
        throw std::invalid_argument("--descent must be 'potential' or 'simultaneous'");
    const LoadedProblem problem = load_problem(cfg);
    const ReactionNetwork& net = problem.net;
    const Vec winf = equilibrium_in_class(net, problem.init, 1e-12);
    const CrnGame game(net, winf);
    const Mat basis = conservation_basis(net);

    IntegrateOptions iopt;
    iopt.t_end = cfg.t_end;
    iopt.step = cfg.step;
    iopt.equilibrium = winf;
    const Trajectory traj = integrate(net, problem.init, iopt);

    DescentOptions dopt;
    dopt.tol = cfg.tol;
    dopt.max_iter = cfg.max_iter;

    ProjectedProblem entropy_problem;
    entropy_problem.objective = [&game](const Vec& w) { return entropy(game, w); };
    entropy_problem.gradient = [&game](const Vec& w) { return entropy_gradient(game, w); };
    entropy_problem.constraints = basis.rows() ? basis : Mat(0, net.species_count());
    entropy_problem.rhs = basis.rows() ? Vec(basis * problem.init) : Vec(0);
    entropy_problem.positive_domain = true;

    const DescentTrace potential_trace = projected_descent(entropy_problem, problem.init, dopt);
    const DescentTrace simultaneous_trace =
        projected_simultaneous_descent(game, basis, problem.init, dopt);

    const DescentTrace& selected =
        cfg.descent == "simultaneous" ? simultaneous_trace : potential_trace;

    if (!cfg.out_csv.empty()) {
        std::ofstream ode_csv(cfg.out_csv + "_ode.csv");
        std::ofstream descent_csv(cfg.out_csv + "_descent.csv");
        if (!ode_csv || !descent_csv)
            throw std::runtime_error("cannot write CSVs with prefix " + cfg.out_csv);
        write_trajectory_csv(ode_csv, traj, net.species());
        write_trace_csv(descent_csv, selected, net.species());
    }

    const Vec& ode_limit = traj.final_state();
    const double equilibrium_check_tol = 1e-5;
    auto near_equilibrium = [&](const Vec& w) {
        return (w - winf).cwiseAbs().maxCoeff() <= equilibrium_check_tol;
    };

    Json report;
    report["command"] = "compare";
    report["equilibrium"] = vector_to_json(winf);
    report["ode_limit"] = vector_to_json(ode_limit);
    report["descent_variant"] = cfg.descent == "simultaneous" ? "simultaneous" : "potential";
    report["potential_descent"] = {
        {"limit", vector_to_json(potential_trace.last())},
        {"iterations", potential_trace.iterations()},
        {"termination", to_string(potential_trace.termination)},
        {"distance_to_equilibrium",
         (potential_trace.last() - winf).cwiseAbs().maxCoeff()}};
    report["simultaneous_descent"] = {
        {"limit", vector_to_json(simultaneous_trace.last())},
        {"iterations", simultaneous_trace.iterations()},
        {"termination", to_string(simultaneous_trace.termination)},
        {"distance_to_equilibrium",
         (simultaneous_trace.last() - winf).cwiseAbs().maxCoeff()}};
    report["limit_distance"] = (ode_limit - selected.last()).cwiseAbs().maxCoeff();
    report["both_pass_equilibrium_check"] =
        near_equilibrium(ode_limit) && near_equilibrium(selected.last());
    emit_report(report, cfg, out);
    return 0;
}

}  // namespace

int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (cfg.command == "check") return run_check(cfg, out);
        if (cfg.command == "simulate") return run_simulate(cfg, out);
        if (cfg.command == "equilibrate") return run_equilibrate(cfg, out);
        if (cfg.command == "rate") return run_rate(cfg, out);
        if (cfg.command == "compare") return run_compare(cfg, out);
        err << "error: unknown command '" << cfg.command << "'\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace crn
