#include "escat/tmx.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>

#include "escat/errors.hpp"

namespace escat {

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::solved: return "solved";
        case Provenance::ingested: return "ingested";
        case Provenance::synthetic: return "synthetic";
    }
    return "unknown";
}

Provenance provenance_from_string(const std::string& s) {
    if (s == "solved") return Provenance::solved;
    if (s == "ingested") return Provenance::ingested;
    if (s == "synthetic") return Provenance::synthetic;
    throw io_error("unknown provenance tag: " + s);
}

const TMatrixSet::JBlock* TMatrixSet::block(HalfInt J) const {
    for (const auto& b : blocks) {
        if (b.J == J) return &b;
    }
    return nullptr;
}

std::optional<std::complex<double>> TMatrixSet::lookup(HalfInt J, const ChannelKey& bra,
                                                       const ChannelKey& ket) const {
    const JBlock* b = block(J);
    if (!b) return std::nullopt;
    const int i = b->find(bra);
    const int j = b->find(ket);
    if (i < 0 || j < 0) return std::nullopt;
    return b->T(i, j);
}

int TMatrixSet::max_J() const {
    int m = -1;
    for (const auto& b : blocks) m = std::max(m, b.J.as_int());
    return m;
}

void TMatrixSet::rebuild_indexes() {
    for (auto& b : blocks) {
        b.index.clear();
        for (std::size_t i = 0; i < b.channels.size(); ++i) {
            b.index.emplace(key_of(b.channels[i]), static_cast<int>(i));
        }
    }
}

void TMatrixSet::validate() const {
    for (const auto& b : blocks) {
        if (b.T.rows() != b.T.cols() ||
            b.T.rows() != static_cast<Eigen::Index>(b.channels.size())) {
            throw io_error("TMatrixSet: block shape mismatch at J=" + b.J.str());
        }
        if (!b.T.allFinite()) throw io_error("TMatrixSet: non-finite T at J=" + b.J.str());
        for (const auto& c : b.channels) {
            if (!triangle_ok(c.mol1.j, c.mol2.j, c.j12) || !triangle_ok(c.j12, c.l, c.J)) {
                throw io_error("TMatrixSet: channel violates triangle rules at J=" + b.J.str());
            }
            if (b.find(key_of(c).exchanged()) < 0) {
                throw io_error("TMatrixSet: exchange partner missing for a channel at J=" +
                               b.J.str());
            }
        }
    }
}

TMatrixSet::JBlock block_from_smatrix(const SMatrixBlock& s) {
    TMatrixSet::JBlock b;
    b.J = s.J;
    b.channels = s.open_channels;
    b.T = Eigen::MatrixXcd::Identity(s.S.rows(), s.S.cols()) - s.S;
    for (std::size_t i = 0; i < b.channels.size(); ++i) {
        b.index.emplace(key_of(b.channels[i]), static_cast<int>(i));
    }
    return b;
}

TMatrixSet assemble(const std::vector<SMatrixBlock>& blocks, const CollisionSpec& spec,
                    const PotentialModel& model) {
    TMatrixSet set;
    set.E_k_cm1 = spec.E_k_cm1;
    set.E_total_cm1 = spec.total_energy_cm1();
    set.mu_amu = spec.mu_amu;
    set.provenance = Provenance::solved;
    set.potential_hash = model.content_hash();
    set.trunc = spec.trunc;
    for (const auto& s : blocks) set.blocks.push_back(block_from_smatrix(s));
    set.validate();
    return set;
}

// ------------------------------------------------------------------- I/O

void save_tmatrix(const std::string& path, const TMatrixSet& set) {
    set.validate();
    std::ofstream out(path);
    if (!out) throw io_error("cannot write T-matrix file: " + path);
    out << "# T-matrix set: one record per (J, bra, ket); quantum numbers are 2j values\n";
    out << "schema_version 1\n";
    out << std::setprecision(17);
    out << "convention " << set.convention << "\n";
    out << "provenance " << to_string(set.provenance) << "\n";
    out << "potential_hash " << set.potential_hash << "\n";
    out << "E_k_cm1 " << set.E_k_cm1 << "\n";
    out << "E_total_cm1 " << set.E_total_cm1 << "\n";
    out << "mu_amu " << set.mu_amu << "\n";
    out << "basis j_max " << set.trunc.j_max << " v_max " << set.trunc.v_max << " para "
        << (set.trunc.para_only ? 1 : 0) << " B_cm1 " << set.trunc.B_cm1 << " vib_spacing_cm1 "
        << set.trunc.vib_spacing_cm1 << "\n";
    out << "nblocks " << set.blocks.size() << "\n";
    for (const auto& b : set.blocks) {
        out << "block J " << b.J.twice() << " nchannels " << b.channels.size() << "\n";
        for (std::size_t i = 0; i < b.channels.size(); ++i) {
            const auto& c = b.channels[i];
            out << "channel " << i << " " << c.mol1.j.twice() << " " << c.mol1.v << " "
                << c.mol2.j.twice() << " " << c.mol2.v << " " << c.j12.twice() << " "
                << c.l.twice() << " " << c.channel_energy_cm1 << " " << c.k_A_inv << " "
                << (c.open ? "open" : "closed") << "\n";
        }
        for (Eigen::Index i = 0; i < b.T.rows(); ++i) {
            for (Eigen::Index j = 0; j < b.T.cols(); ++j) {
                const std::complex<double> t = b.T(i, j);
                if (!std::isfinite(t.real()) || !std::isfinite(t.imag())) {
                    throw io_error("save_tmatrix: non-finite element");
                }
                const auto& br = b.channels[i];
                const auto& kt = b.channels[j];
                out << "t " << b.J.twice() << "  " << br.mol1.j.twice() << " " << br.mol1.v << " "
                    << br.mol2.j.twice() << " " << br.mol2.v << " " << br.j12.twice() << " "
                    << br.l.twice() << "  " << kt.mol1.j.twice() << " " << kt.mol1.v << " "
                    << kt.mol2.j.twice() << " " << kt.mol2.v << " " << kt.j12.twice() << " "
                    << kt.l.twice() << "  " << t.real() << " " << t.imag() << "\n";
            }
        }
    }
    out << "end\n";
    if (!out) throw io_error("write failure: " + path);
}

TMatrixSet load_tmatrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("T-matrix file not found: " + path);
    TMatrixSet set;
    std::string line;
    int lineno = 0;
    bool saw_schema = false, saw_end = false;
    TMatrixSet::JBlock* cur = nullptr;

    auto fail = [&](const std::string& msg) {
        throw io_error(path + ":" + std::to_string(lineno) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line[0] == '#') continue;
        std::istringstream ss(line);
        std::string key;
        if (!(ss >> key)) continue;
        if (key == "schema_version") {
            int v = -1;
            ss >> v;
            if (v != 1) fail("unsupported schema version " + std::to_string(v));
            saw_schema = true;
        } else if (key == "convention") {
            ss >> set.convention;
        } else if (key == "provenance") {
            std::string p;
            ss >> p;
            set.provenance = provenance_from_string(p);
        } else if (key == "potential_hash") {
            ss >> set.potential_hash;
        } else if (key == "E_k_cm1") {
            ss >> set.E_k_cm1;
        } else if (key == "E_total_cm1") {
            ss >> set.E_total_cm1;
        } else if (key == "mu_amu") {
            ss >> set.mu_amu;
        } else if (key == "basis") {
            std::string k1, k2, k3, k4, k5;
            int para = 1;
            if (!(ss >> k1 >> set.trunc.j_max >> k2 >> set.trunc.v_max >> k3 >> para >> k4 >>
                  set.trunc.B_cm1 >> k5 >> set.trunc.vib_spacing_cm1)) {
                fail("malformed basis line");
            }
            set.trunc.para_only = para != 0;
        } else if (key == "nblocks") {
            std::size_t nb = 0;
            ss >> nb;
            set.blocks.reserve(nb);
        } else if (key == "block") {
            std::string kJ, kn;
            int tJ = 0;
            std::size_t nch = 0;
            if (!(ss >> kJ >> tJ >> kn >> nch)) fail("malformed block line");
            set.blocks.emplace_back();
            cur = &set.blocks.back();
            cur->J = HalfInt::from_twice(tJ);
            cur->channels.reserve(nch);
        } else if (key == "channel") {
            if (!cur) fail("channel record outside a block");
            std::size_t idx;
            int tj1, v1, tj2, v2, tj12, tl;
            double e, k;
            std::string flag;
            if (!(ss >> idx >> tj1 >> v1 >> tj2 >> v2 >> tj12 >> tl >> e >> k >> flag)) {
                fail("malformed channel record");
            }
            if (idx != cur->channels.size()) fail("channel index out of order");
            ChannelState c;
            c.mol1 = {HalfInt::from_twice(tj1), v1, 0.0};
            c.mol2 = {HalfInt::from_twice(tj2), v2, 0.0};
            c.mol1.energy_cm1 = level_energy(c.mol1.j, v1, set.trunc);
            c.mol2.energy_cm1 = level_energy(c.mol2.j, v2, set.trunc);
            c.j12 = HalfInt::from_twice(tj12);
            c.l = HalfInt::from_twice(tl);
            c.J = cur->J;
            c.channel_energy_cm1 = e;
            c.k_A_inv = k;
            c.open = flag == "open";
            cur->channels.push_back(c);
        } else if (key == "t") {
            if (!cur) fail("t record outside a block");
            if (cur->T.size() == 0) {
                const auto n = static_cast<Eigen::Index>(cur->channels.size());
                cur->T = Eigen::MatrixXcd::Zero(n, n);
                cur->index.clear();
                for (std::size_t i = 0; i < cur->channels.size(); ++i) {
                    cur->index.emplace(key_of(cur->channels[i]), static_cast<int>(i));
                }
            }
            int tJ;
            ChannelKey bra, ket;
            double re, im;
            if (!(ss >> tJ >> bra.tj1 >> bra.v1 >> bra.tj2 >> bra.v2 >> bra.tj12 >> bra.tl >>
                  ket.tj1 >> ket.v1 >> ket.tj2 >> ket.v2 >> ket.tj12 >> ket.tl >> re >> im)) {
                fail("malformed t record");
            }
            if (tJ != cur->J.twice()) fail("t record J does not match its block");
            if (!std::isfinite(re) || !std::isfinite(im)) fail("non-finite t record");
            const int i = cur->find(bra);
            const int j = cur->find(ket);
            if (i < 0 || j < 0) fail("t record references an unlisted channel");
            cur->T(i, j) = {re, im};
        } else if (key == "end") {
            saw_end = true;
        } else {
            fail("unknown key: " + key);
        }
    }
    if (!saw_schema) throw io_error(path + ": missing schema_version");
    if (!saw_end) throw io_error(path + ": truncated file (missing end marker)");
    set.validate();
    return set;
}

// -------------------------------------------------------------- synthesis

TMatrixSet synthesize_unitary(double E_k_cm1, const BasisTruncation& trunc, int J_max,
                              double mu_amu, std::uint64_t seed, bool exchange_symmetrize,
                              const MoleculeLabels& mol1, const MoleculeLabels& mol2,
                              const PhysicalConstants& pc) {
    if (J_max < 0) throw input_error("synthesize_unitary: J_max must be >= 0");
    const double E_total = E_k_cm1 + level_energy(mol1.j, mol1.v, trunc) +
                           level_energy(mol2.j, mol2.v, trunc);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uni(0.0, 2.0 * M_PI);

    TMatrixSet set;
    set.E_k_cm1 = E_k_cm1;
    set.E_total_cm1 = E_total;
    set.mu_amu = mu_amu;
    set.provenance = Provenance::synthetic;
    set.trunc = trunc;

    for (int Jint = 0; Jint <= J_max; ++Jint) {
        const HalfInt J(Jint);
        auto all = build_channel_basis_at_energy(E_total, trunc, J, mu_amu, pc);
        std::vector<ChannelState> open;
        for (const auto& c : all) {
            if (c.open) open.push_back(c);
        }
        if (open.empty()) continue;
        const int n = static_cast<int>(open.size());

        std::unordered_map<ChannelKey, int, ChannelKeyHash> idx;
        for (int i = 0; i < n; ++i) idx.emplace(key_of(open[i]), i);

        // Exchange/parity-adapted rows: for a pair (a, a~) the combinations
        // (|a> + phi |a~>)/sqrt2 carry exchange eta = +-1 with
        // phi = (-1)^{j1+j2+j12+l}; self-exchanged channels carry eta = phi.
        Eigen::MatrixXd U = Eigen::MatrixXd::Zero(n, n);
        std::vector<int> eta(n), par(n);
        int row = 0;
        std::vector<bool> used(n, false);
        for (int i = 0; i < n; ++i) {
            if (used[i]) continue;
            const ChannelKey k = key_of(open[i]);
            const int parity =
                phase(open[i].mol1.j + open[i].mol2.j + open[i].l);
            const int phi = phase(open[i].mol1.j + open[i].mol2.j + open[i].j12 + open[i].l);
            const int ie = idx.at(k.exchanged());
            if (ie == i) {
                U(row, i) = 1.0;
                eta[row] = phi;
                par[row] = parity;
                used[i] = true;
                ++row;
            } else {
                const double s = 1.0 / std::sqrt(2.0);
                U(row, i) = s;
                U(row, ie) = phi * s;
                eta[row] = +1;
                par[row] = parity;
                U(row + 1, i) = s;
                U(row + 1, ie) = -phi * s;
                eta[row + 1] = -1;
                par[row + 1] = parity;
                used[i] = used[ie] = true;
                row += 2;
            }
        }

        // Sector map: (eta when exchange-symmetrizing, parity always).
        std::map<std::pair<int, int>, std::vector<int>> sectors;
        for (int r = 0; r < n; ++r) {
            sectors[{exchange_symmetrize ? eta[r] : 0, par[r]}].push_back(r);
        }

        Eigen::MatrixXcd Sad = Eigen::MatrixXcd::Zero(n, n);
        for (const auto& [tag, rows] : sectors) {
            const int d = static_cast<int>(rows.size());
            Eigen::MatrixXcd A(d, d);
            for (int a = 0; a < d; ++a) {
                for (int b = 0; b < d; ++b) A(a, b) = {gauss(rng), gauss(rng)};
            }
            const Eigen::MatrixXcd Qm = Eigen::HouseholderQR<Eigen::MatrixXcd>(A).householderQ();
            Eigen::VectorXcd ph(d);
            for (int a = 0; a < d; ++a) ph(a) = std::polar(1.0, uni(rng));
            // unitary and complex-symmetric: S = Q diag(e^{i theta}) Q^T
            const Eigen::MatrixXcd Ssec = Qm * ph.asDiagonal() * Qm.transpose();
            for (int a = 0; a < d; ++a) {
                for (int b = 0; b < d; ++b) Sad(rows[a], rows[b]) = Ssec(a, b);
            }
        }
        const Eigen::MatrixXcd Sdist = U.transpose() * Sad * U;

        TMatrixSet::JBlock blk;
        blk.J = J;
        blk.channels = std::move(open);
        blk.T = Eigen::MatrixXcd::Identity(n, n) - Sdist;
        blk.index = std::move(idx);
        set.blocks.push_back(std::move(blk));
    }
    set.validate();
    return set;
}

// ---------------------------------------------------------- exchange check

ExchangeReport check_exchange_relation(const TMatrixSet& set, HalfInt bra_j, int bra_v,
                                       HalfInt ket_j1, int ket_v1, HalfInt ket_j2, int ket_v2) {
    ExchangeReport rep;
    const ChannelKey ket_proto{ket_j1.twice(), ket_v1, ket_j2.twice(), ket_v2, 0, 0};
    if (ket_proto.self_exchanged()) {
        throw input_error("check_exchange_relation: ket pair is self-exchanged, nothing to check");
    }
    std::vector<ExchangeOffender> all;
    for (const auto& b : set.blocks) {
        for (int i = 0; i < static_cast<int>(b.channels.size()); ++i) {
            const auto& br = b.channels[i];
            if (br.mol1.j != bra_j || br.mol1.v != bra_v || br.mol2.j != bra_j ||
                br.mol2.v != bra_v) {
                continue;
            }
            for (int j = 0; j < static_cast<int>(b.channels.size()); ++j) {
                const auto& kt = b.channels[j];
                if (kt.mol1.j != ket_j1 || kt.mol1.v != ket_v1 || kt.mol2.j != ket_j2 ||
                    kt.mol2.v != ket_v2) {
                    continue;
                }
                const int je = b.find(key_of(kt).exchanged());
                if (je < 0) {
                    throw input_error("check_exchange_relation: missing exchange partner");
                }
                const std::complex<double> direct = b.T(i, j);
                const std::complex<double> exch = b.T(i, je);
                const double ph = phase(br.j12);
                const double dev = std::abs(direct - ph * exch);
                all.push_back({b.J.as_int(), key_of(br), key_of(kt), direct, exch, dev});
                rep.reference_magnitude =
                    std::max({rep.reference_magnitude, std::abs(direct), std::abs(exch)});
                ++rep.entries_compared;
            }
        }
    }
    if (rep.entries_compared == 0) {
        throw input_error("check_exchange_relation: no matching (bra, ket) entries in the set");
    }
    const double ref = rep.reference_magnitude > 0.0 ? rep.reference_magnitude : 1.0;
    for (auto& o : all) {
        o.deviation /= ref;
        rep.max_relative_deviation = std::max(rep.max_relative_deviation, o.deviation);
    }
    std::sort(all.begin(), all.end(),
              [](const ExchangeOffender& a, const ExchangeOffender& b) {
                  return a.deviation > b.deviation;
              });
    if (all.size() > 10) all.resize(10);
    rep.worst = std::move(all);
    return rep;
}

}  // namespace escat
