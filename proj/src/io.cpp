#include "crn/io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace crn {

std::string format_double(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

Json network_to_json(const ReactionNetwork& net) {
    Json j;
    j["species"] = net.species();
    Json reactions = Json::array();
    for (const Reaction& r : net.reactions()) {
        Json jr;
        jr["alpha"] = std::vector<int>(r.alpha.data(), r.alpha.data() + r.alpha.size());
        jr["beta"] = std::vector<int>(r.beta.data(), r.beta.data() + r.beta.size());
        jr["kf"] = r.k_fw;
        jr["kb"] = r.k_bw;
        reactions.push_back(std::move(jr));
    }
    j["reactions"] = std::move(reactions);
    return j;
}

ReactionNetwork network_from_json(const Json& j) {
    std::vector<std::string> species = j.at("species").get<std::vector<std::string>>();
    const int n = static_cast<int>(species.size());
    std::vector<Reaction> reactions;
    for (const Json& jr : j.at("reactions")) {
        Reaction r;
        const auto alpha = jr.at("alpha").get<std::vector<int>>();
        const auto beta = jr.at("beta").get<std::vector<int>>();
        if (static_cast<int>(alpha.size()) != n || static_cast<int>(beta.size()) != n)
            throw std::invalid_argument("stoichiometric vector length mismatch in JSON");
        r.alpha = Eigen::Map<const IVec>(alpha.data(), n);
        r.beta = Eigen::Map<const IVec>(beta.data(), n);
        r.k_fw = jr.at("kf").get<double>();
        r.k_bw = jr.at("kb").get<double>();
        reactions.push_back(std::move(r));
    }
    return ReactionNetwork(std::move(species), std::move(reactions));
}

Json matrix_to_json(const Mat& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat matrix_from_json(const Json& j) {
    const int rows = static_cast<int>(j.size());
    if (rows == 0) return Mat(0, 0);
    const int cols = static_cast<int>(j.at(0).size());
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(j.at(i).size()) != cols)
            throw std::invalid_argument("ragged matrix in JSON");
        for (int c = 0; c < cols; ++c) m(i, c) = j.at(i).at(c).get<double>();
    }
    return m;
}

Json vector_to_json(const Vec& v) {
    Json out = Json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Vec vector_from_json(const Json& j) {
    Vec v(static_cast<int>(j.size()));
    for (int i = 0; i < v.size(); ++i) v[i] = j.at(i).get<double>();
    return v;
}

Mat read_matrix_text(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::vector<double> row;
        double x;
        while (ls >> x) row.push_back(x);
        if (row.empty()) continue;
        if (!rows.empty() && rows.front().size() != row.size())
            throw std::invalid_argument("ragged rows in matrix text");
        rows.push_back(std::move(row));
    }
    Mat m(static_cast<int>(rows.size()), rows.empty() ? 0 : static_cast<int>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    return m;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const std::vector<std::string>& species) {
    out << 't';
    for (const auto& s : species) out << ',' << s;
    out << ",entropy,dissipation\n";
    for (int k = 0; k < traj.size(); ++k) {
        out << format_double(traj.times[k]);
        for (int i = 0; i < traj.states[k].size(); ++i)
            out << ',' << format_double(traj.states[k][i]);
        out << ',';
        if (traj.has_equilibrium()) out << format_double(traj.entropy[k]);
        out << ',' << format_double(traj.dissipation[k]) << '\n';
    }
}

void write_trace_csv(std::ostream& out, const DescentTrace& trace,
                     const std::vector<std::string>& columns) {
    out << "iter,f,grad_norm";
    for (const auto& c : columns) out << ',' << c;
    out << '\n';
    for (std::size_t k = 0; k < trace.iterates.size(); ++k) {
        out << k << ',' << format_double(trace.objective_values[k]) << ','
            << format_double(trace.gradient_norms[k]);
        for (int i = 0; i < trace.iterates[k].size(); ++i)
            out << ',' << format_double(trace.iterates[k][i]);
        out << '\n';
    }
    Json footer;
    footer["termination"] = to_string(trace.termination);
    footer["iterations"] = trace.iterations();
    out << "# " << footer.dump() << '\n';
}

}  // namespace crn
