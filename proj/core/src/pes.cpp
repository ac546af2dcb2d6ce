#include "escat/pes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "escat/angmom.hpp"
#include "escat/errors.hpp"

namespace escat {

namespace {
constexpr double kGridRMin = 0.4;    // A
constexpr double kGridRMax = 250.0;  // A; beyond this the tail is treated as zero
constexpr int kGridPoints = 3072;
}  // namespace

RadialTable RadialTable::from_points(const std::vector<double>& R,
                                     const std::vector<double>& value) {
    if (R.size() != value.size() || R.size() < 4) {
        throw input_error("RadialTable: need at least 4 (R, value) pairs");
    }
    for (std::size_t i = 1; i < R.size(); ++i) {
        if (!(R[i] > R[i - 1])) throw input_error("RadialTable: R nodes must increase");
    }
    if (R.front() <= 0.0) throw input_error("RadialTable: R must be positive");
    RadialTable t;
    t.r_ = R;
    t.v_ = value;
    t.u_.resize(R.size());
    for (std::size_t i = 0; i < R.size(); ++i) t.u_[i] = std::log(R[i]);

    // Natural cubic spline second derivatives (tridiagonal sweep).
    const std::size_t n = R.size();
    t.d2_.assign(n, 0.0);
    std::vector<double> tmp(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double sig = (t.u_[i] - t.u_[i - 1]) / (t.u_[i + 1] - t.u_[i - 1]);
        const double p = sig * t.d2_[i - 1] + 2.0;
        t.d2_[i] = (sig - 1.0) / p;
        double q = (t.v_[i + 1] - t.v_[i]) / (t.u_[i + 1] - t.u_[i]) -
                   (t.v_[i] - t.v_[i - 1]) / (t.u_[i] - t.u_[i - 1]);
        tmp[i] = (6.0 * q / (t.u_[i + 1] - t.u_[i - 1]) - sig * tmp[i - 1]) / p;
    }
    t.d2_[n - 1] = 0.0;
    for (std::size_t k = n - 1; k-- > 0;) {
        t.d2_[k] = t.d2_[k] * t.d2_[k + 1] + tmp[k];
    }
    return t;
}

double RadialTable::eval(double R) const {
    if (r_.empty() || R < r_.front() || R > r_.back()) return 0.0;
    const double u = std::log(R);
    const auto it = std::upper_bound(u_.begin(), u_.end(), u);
    std::size_t hi = std::min<std::size_t>(u_.size() - 1, it - u_.begin());
    if (hi == 0) hi = 1;
    const std::size_t lo = hi - 1;
    const double h = u_[hi] - u_[lo];
    const double a = (u_[hi] - u) / h;
    const double b = (u - u_[lo]) / h;
    return a * v_[lo] + b * v_[hi] +
           ((a * a * a - a) * d2_[lo] + (b * b * b - b) * d2_[hi]) * h * h / 6.0;
}

void PotentialModel::validate() const {
    for (const auto& t : terms) {
        if (t.lambda1 < 0 || t.lambda2 < 0 || t.lambda < 0) {
            throw input_error("PotentialModel: negative expansion index");
        }
        if (t.lambda < std::abs(t.lambda1 - t.lambda2) || t.lambda > t.lambda1 + t.lambda2) {
            throw input_error("PotentialModel: term (" + std::to_string(t.lambda1) + "," +
                              std::to_string(t.lambda2) + "," + std::to_string(t.lambda) +
                              ") violates the triangle rule");
        }
        if (para_symmetry && (t.lambda1 % 2 != 0 || t.lambda2 % 2 != 0)) {
            throw input_error("PotentialModel: odd lambda with para symmetry imposed");
        }
    }
    if (symmetric_under_exchange) {
        for (const auto& t : terms) {
            const bool found = std::any_of(terms.begin(), terms.end(), [&](const RadialTerm& s) {
                return s.lambda1 == t.lambda2 && s.lambda2 == t.lambda1 && s.lambda == t.lambda;
            });
            if (!found) {
                throw input_error("PotentialModel: symmetric_under_exchange set but the (" +
                                  std::to_string(t.lambda2) + "," + std::to_string(t.lambda1) +
                                  "," + std::to_string(t.lambda) + ") mirror term is missing");
            }
        }
    }
}

std::string PotentialModel::content_hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& t : terms) {
        mix(&t.lambda1, sizeof t.lambda1);
        mix(&t.lambda2, sizeof t.lambda2);
        mix(&t.lambda, sizeof t.lambda);
        for (double v : t.radial.values()) mix(&v, sizeof v);
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

PotentialModel default_model(double eps_cm1, double rm_A, double aniso_cm1,
                             double aniso_decay_inv_A) {
    const double scale = std::pow(4.0 * M_PI, 1.5);
    PotentialModel m;
    RadialTerm iso;
    iso.lambda1 = iso.lambda2 = iso.lambda = 0;
    iso.radial = RadialTable::sample(
        [=](double R) {
            const double s6 = std::pow(rm_A / R, 6);
            return scale * eps_cm1 * (s6 * s6 - 2.0 * s6);
        },
        kGridRMin, kGridRMax, kGridPoints);
    m.terms.push_back(iso);

    for (auto [l1, l2] : {std::pair{2, 0}, std::pair{0, 2}}) {
        RadialTerm an;
        an.lambda1 = l1;
        an.lambda2 = l2;
        an.lambda = 2;
        an.radial = RadialTable::sample(
            [=](double R) { return scale * aniso_cm1 * std::exp(-aniso_decay_inv_A * (R - rm_A)); },
            kGridRMin, kGridRMax, kGridPoints);
        m.terms.push_back(an);
    }
    m.symmetric_under_exchange = true;
    m.para_symmetry = true;
    m.validate();
    return m;
}

PotentialModel load_potential(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("potential file not found: " + path);
    std::string line;
    PotentialModel m;
    int nterms = -1;
    int schema = -1;
    auto next_line = [&](std::string& out) {
        while (std::getline(in, out)) {
            const auto hash = out.find('#');
            if (hash != std::string::npos) out.erase(hash);
            if (out.find_first_not_of(" \t\r\n") != std::string::npos) return true;
        }
        return false;
    };
    while (next_line(line)) {
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "schema_version") {
            ss >> schema;
            if (schema != 1) throw io_error(path + ": unsupported potential schema version");
        } else if (key == "para_symmetry") {
            int v;
            ss >> v;
            m.para_symmetry = v != 0;
        } else if (key == "symmetric_under_exchange") {
            int v;
            ss >> v;
            m.symmetric_under_exchange = v != 0;
        } else if (key == "nterms") {
            ss >> nterms;
        } else if (key == "term") {
            RadialTerm t;
            std::string kind;
            if (!(ss >> t.lambda1 >> t.lambda2 >> t.lambda >> kind)) {
                throw io_error(path + ": malformed term record: " + line);
            }
            if (kind == "table") {
                int n;
                if (!(ss >> n) || n < 4) throw io_error(path + ": bad table length");
                std::vector<double> R(n), V(n);
                for (int i = 0; i < n; ++i) {
                    if (!next_line(line)) throw io_error(path + ": truncated table");
                    std::istringstream row(line);
                    if (!(row >> R[i] >> V[i])) throw io_error(path + ": bad table row: " + line);
                    if (!std::isfinite(R[i]) || !std::isfinite(V[i])) {
                        throw io_error(path + ": non-finite table entry");
                    }
                }
                t.radial = RadialTable::from_points(R, V);
            } else if (kind == "lj") {
                double eps, rm, sc;
                if (!(ss >> eps >> rm >> sc)) throw io_error(path + ": lj needs eps rm scale");
                t.radial = RadialTable::sample(
                    [=](double R) {
                        const double s6 = std::pow(rm / R, 6);
                        return sc * eps * (s6 * s6 - 2.0 * s6);
                    },
                    kGridRMin, kGridRMax, kGridPoints);
            } else if (kind == "exp") {
                double amp, decay, r0, sc;
                if (!(ss >> amp >> decay >> r0 >> sc)) {
                    throw io_error(path + ": exp needs amp decay r0 scale");
                }
                t.radial = RadialTable::sample(
                    [=](double R) { return sc * amp * std::exp(-decay * (R - r0)); }, kGridRMin,
                    kGridRMax, kGridPoints);
            } else {
                throw io_error(path + ": unknown radial kind " + kind);
            }
            m.terms.push_back(std::move(t));
        } else {
            throw io_error(path + ": unknown key " + key);
        }
    }
    if (schema != 1) throw io_error(path + ": missing schema_version");
    if (nterms >= 0 && static_cast<int>(m.terms.size()) != nterms) {
        throw io_error(path + ": nterms mismatch");
    }
    m.validate();
    return m;
}

void save_potential(const std::string& path, const PotentialModel& m) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write potential file: " + path);
    out << "# angular-expansion potential, v(R) tables in cm^-1, R in A\n";
    out << "schema_version 1\n";
    out << "para_symmetry " << (m.para_symmetry ? 1 : 0) << "\n";
    out << "symmetric_under_exchange " << (m.symmetric_under_exchange ? 1 : 0) << "\n";
    out << "nterms " << m.terms.size() << "\n";
    out << std::setprecision(17);
    for (const auto& t : m.terms) {
        const auto& R = t.radial.nodes_R();
        const auto& V = t.radial.values();
        out << "term " << t.lambda1 << " " << t.lambda2 << " " << t.lambda << " table " << R.size()
            << "\n";
        for (std::size_t i = 0; i < R.size(); ++i) out << R[i] << " " << V[i] << "\n";
    }
    if (!out) throw io_error("write failure: " + path);
}

double coupling_matrix_element(const ChannelState& bra, const ChannelState& ket,
                               const RadialTerm& term) {
    if (bra.J != ket.J) throw input_error("coupling_matrix_element: bra/ket J mismatch");
    using namespace angmom;
    const HalfInt j1 = bra.mol1.j, j2 = bra.mol2.j, j12 = bra.j12, l = bra.l;
    const HalfInt j1p = ket.mol1.j, j2p = ket.mol2.j, j12p = ket.j12, lp = ket.l;
    const HalfInt L1(term.lambda1), L2(term.lambda2), L(term.lambda);
    const HalfInt J = bra.J;
    const HalfInt zero(0);

    const double t1 = wigner_3j(j1, L1, j1p, zero, zero, zero);
    if (t1 == 0.0) return 0.0;
    const double t2 = wigner_3j(j2, L2, j2p, zero, zero, zero);
    if (t2 == 0.0) return 0.0;
    const double t3 = wigner_3j(l, L, lp, zero, zero, zero);
    if (t3 == 0.0) return 0.0;
    const double s6 = wigner_6j(j12, j12p, L, lp, l, J);
    if (s6 == 0.0) return 0.0;
    const double s9 = wigner_9j(j1, j1p, L1, j2, j2p, L2, j12, j12p, L);
    if (s9 == 0.0) return 0.0;

    auto dim = [](HalfInt j) { return double(j.twice() + 1); };
    const double pref =
        phase(j1 + j2 + j12p + J) * std::pow(4.0 * M_PI, -1.5) *
        std::sqrt(dim(j1) * dim(j1p) * dim(j2) * dim(j2p) * dim(j12) * dim(j12p) * dim(l) *
                  dim(lp)) *
        (2.0 * term.lambda + 1.0) * std::sqrt((2.0 * term.lambda1 + 1.0) * (2.0 * term.lambda2 + 1.0));
    return pref * t1 * t2 * t3 * s6 * s9;
}

CouplingTable build_coupling_table(const std::vector<ChannelState>& basis,
                                   const PotentialModel& model) {
    model.validate();
    CouplingTable table;
    const int n = static_cast<int>(basis.size());
    table.factors.reserve(model.terms.size());
    for (const auto& term : model.terms) {
        Eigen::MatrixXd F(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                // <i|A|j> is symmetric for the full model; an individual
                // (l1,l2,l) factor is not, so both orientations are evaluated.
                F(i, j) = coupling_matrix_element(basis[i], basis[j], term);
                if (j != i) F(j, i) = coupling_matrix_element(basis[j], basis[i], term);
            }
        }
        table.factors.push_back(std::move(F));
    }
    return table;
}

Eigen::MatrixXd potential_matrix(double R, const CouplingTable& table,
                                 const PotentialModel& model) {
    if (R <= 0.0) throw input_error("potential_matrix: R must be positive");
    if (table.factors.empty()) throw input_error("potential_matrix: empty coupling table");
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(table.factors[0].rows(), table.factors[0].cols());
    for (std::size_t t = 0; t < model.terms.size(); ++t) {
        const double v = model.terms[t].radial.eval(R);
        if (v != 0.0) W += v * table.factors[t];
    }
    return 0.5 * (W + W.transpose());  // symmetrize away last-ulp asymmetry
}

Eigen::MatrixXd potential_matrix(double R, const std::vector<ChannelState>& basis,
                                 const PotentialModel& model) {
    return potential_matrix(R, build_coupling_table(basis, model), model);
}

}  // namespace escat
