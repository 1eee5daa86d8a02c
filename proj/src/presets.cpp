#include "crn/presets.hpp"

namespace crn {

namespace {

Vec make_vec(std::initializer_list<double> values) {
    Vec v(static_cast<int>(values.size()));
    int i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

std::vector<Preset> build_presets() {
    std::vector<Preset> out;

    out.push_back({"example1",
                   "single reversible reaction 2 NaCl + CaCO3 <-> Na2CO3 + CaCl2, unit rates",
                   "2 NaCl + CaCO3 <-> Na2CO3 + CaCl2 | kf=1 kb=1\n",
                   make_vec({0.6, 1.2, 0.9, 1.1})});

    out.push_back({"example2",
                   "combustion subsystem: O2, H2, CO2, OH and H2O dissociation, unit rates",
                   "O2 <-> 2 O | kf=1 kb=1\n"
                   "H2 <-> 2 H | kf=1 kb=1\n"
                   "CO2 <-> O + CO | kf=1 kb=1\n"
                   "OH <-> O + H | kf=1 kb=1\n"
                   "H2O <-> O + 2 H | kf=1 kb=1\n",
                   make_vec({0.5, 1.2, 0.8, 1.5, 1.0, 0.7, 1.1, 0.9})});

    out.push_back({"example3",
                   "three-species network without conservation laws, unit rates",
                   "S1 + S2 <-> 3 S1 | kf=1 kb=1\n"
                   "S1 + S2 <-> 2 S2 | kf=1 kb=1\n"
                   "3 S1 <-> 2 S1 + S3 | kf=1 kb=1\n"
                   "2 S1 + S3 <-> 2 S2 | kf=1 kb=1\n",
                   make_vec({2.0, 0.5, 1.5})});

    out.push_back({"ab", "isomerization A <-> B with unit rates",
                   "A <-> B | kf=1 kb=1\n", make_vec({1.8, 0.2})});

    out.push_back({"a2b", "dimerization 2 A <-> B with unit rates",
                   "2 A <-> B | kf=1 kb=1\n", make_vec({2.0, 1.0})});

    out.push_back({"cycle3",
                   "irreversibly biased 3-cycle; violates the Wegscheider conditions",
                   "A <-> B | kf=2 kb=1\n"
                   "B <-> C | kf=2 kb=1\n"
                   "C <-> A | kf=2 kb=1\n",
                   make_vec({1.0, 1.0, 1.0})});

    return out;
}

}  // namespace

const std::vector<Preset>& presets() {
    static const std::vector<Preset> table = build_presets();
    return table;
}

const Preset* find_preset(std::string_view name) {
    for (const Preset& p : presets())
        if (p.name == name) return &p;
    return nullptr;
}

ReactionNetwork preset_network(std::string_view name) {
    const Preset* p = find_preset(name);
    if (!p) throw std::invalid_argument("unknown preset: " + std::string(name));
    return parse_network(p->crn_text);
}

}  // namespace crn
