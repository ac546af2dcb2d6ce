#include "escat/basis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace escat {

PhysicalConstants default_constants() { return PhysicalConstants{}; }

PhysicalConstants load_constants(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("constants file not found: " + path);
    PhysicalConstants pc;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string key;
        if (!(ss >> key)) continue;
        double value;
        if (!(ss >> value)) {
            throw io_error(path + ":" + std::to_string(lineno) + ": missing value for " + key);
        }
        if (key == "hbar2_over_2amuA2_cm1") {
            pc.hbar2_over_2amuA2_cm1 = value;
        } else if (key == "mass_H2_amu") {
            pc.mass_H2_amu = value;
        } else if (key == "B_cm1") {
            pc.B_cm1 = value;
        } else if (key == "vib_spacing_cm1") {
            pc.vib_spacing_cm1 = value;
        } else {
            throw io_error(path + ":" + std::to_string(lineno) + ": unknown key " + key);
        }
    }
    return pc;
}

ChannelKey key_of(const ChannelState& c) {
    return {c.mol1.j.twice(), c.mol1.v, c.mol2.j.twice(), c.mol2.v, c.j12.twice(), c.l.twice()};
}

void CollisionSpec::validate() const {
    if (E_k_cm1 <= 0.0) throw input_error("CollisionSpec: collision energy must be positive");
    if (mu_amu <= 0.0) throw input_error("CollisionSpec: reduced mass must be positive");
    if (mol1 == mol2) {
        throw input_error(
            "CollisionSpec: identical (j,m,v) labels for both molecules are excluded");
    }
    if (trunc.j_max < 0 || trunc.v_max < 0 || J_max < 0) {
        throw input_error("CollisionSpec: negative truncation");
    }
    for (const auto& mol : {mol1, mol2}) {
        require_valid_jm(mol.j, mol.m, "CollisionSpec");
        if (mol.v < 0) throw input_error("CollisionSpec: negative vibrational quantum number");
        if (mol.j.as_int() > trunc.j_max || mol.v > trunc.v_max) {
            throw input_error("CollisionSpec: initial labels outside basis truncation");
        }
        if (trunc.para_only && mol.j.as_int() % 2 != 0) {
            throw input_error("CollisionSpec: odd j with para restriction on");
        }
    }
}

double level_energy(HalfInt j, int v, const BasisTruncation& t) {
    const double jj = j.value();
    return t.B_cm1 * jj * (jj + 1.0) + t.vib_spacing_cm1 * v;
}

double CollisionSpec::internal_energy_cm1() const {
    return level_energy(mol1.j, mol1.v, trunc) + level_energy(mol2.j, mol2.v, trunc);
}

std::vector<MolecularLevel> enumerate_levels(int j_max, int v_max, double B_cm1,
                                             double vib_spacing_cm1, bool para_only) {
    if (j_max < 0 || v_max < 0) throw input_error("enumerate_levels: negative truncation");
    std::vector<MolecularLevel> out;
    for (int v = 0; v <= v_max; ++v) {
        for (int j = 0; j <= j_max; ++j) {
            if (para_only && j % 2 != 0) continue;
            out.push_back({HalfInt(j), v, B_cm1 * j * (j + 1) + vib_spacing_cm1 * v});
        }
    }
    return out;
}

Wavenumber wavenumber(double E_total_cm1, double E_channel_cm1, double mu_amu,
                      const PhysicalConstants& pc) {
    if (mu_amu <= 0.0) throw input_error("wavenumber: reduced mass must be positive");
    const double arg = (E_total_cm1 - E_channel_cm1) * mu_amu / pc.hbar2_over_2amuA2_cm1;
    if (arg >= 0.0) return {std::sqrt(arg), true};
    return {std::sqrt(-arg), false};
}

std::vector<ChannelState> build_channel_basis_at_energy(double E_total_cm1,
                                                        const BasisTruncation& trunc, HalfInt J,
                                                        double mu_amu,
                                                        const PhysicalConstants& pc) {
    const auto levels =
        enumerate_levels(trunc.j_max, trunc.v_max, trunc.B_cm1, trunc.vib_spacing_cm1,
                         trunc.para_only);
    std::vector<ChannelState> out;
    for (const auto& a : levels) {
        for (const auto& b : levels) {
            for (HalfInt j12 = abs(a.j - b.j); j12 <= a.j + b.j;
                 j12 = j12 + HalfInt::from_twice(2)) {
                for (HalfInt l = abs(J - j12); l <= J + j12; l = l + HalfInt::from_twice(2)) {
                    ChannelState c;
                    c.mol1 = a;
                    c.mol2 = b;
                    c.j12 = j12;
                    c.l = l;
                    c.J = J;
                    c.channel_energy_cm1 = a.energy_cm1 + b.energy_cm1;
                    const Wavenumber k = wavenumber(E_total_cm1, c.channel_energy_cm1, mu_amu, pc);
                    c.k_A_inv = k.value_A_inv;
                    c.open = k.open;
                    out.push_back(c);
                }
            }
        }
    }
    if (out.empty()) throw input_error("build_channel_basis: empty basis");
    std::sort(out.begin(), out.end(), [](const ChannelState& x, const ChannelState& y) {
        const auto tx = std::make_tuple(x.mol1.v, x.mol1.j.twice(), x.mol2.v, x.mol2.j.twice(),
                                        x.j12.twice(), x.l.twice());
        const auto ty = std::make_tuple(y.mol1.v, y.mol1.j.twice(), y.mol2.v, y.mol2.j.twice(),
                                        y.j12.twice(), y.l.twice());
        return tx < ty;
    });
    return out;
}

std::vector<ChannelState> build_channel_basis(const CollisionSpec& spec, HalfInt J,
                                              const PhysicalConstants& pc) {
    spec.validate();
    return build_channel_basis_at_energy(spec.total_energy_cm1(), spec.trunc, J, spec.mu_amu, pc);
}

}  // namespace escat
