#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "escat/basis.hpp"
#include "escat/ccsolve.hpp"

namespace escat {

enum class Provenance { solved, ingested, synthetic };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

// All T^J elements for one collision energy.  Storage is per-J dense blocks
// over the open channels; there is deliberately no M index (T^{JM} does not
// depend on M), so every M consumer reads the same value.
class TMatrixSet {
public:
    struct JBlock {
        HalfInt J;
        std::vector<ChannelState> channels;  // open channels, canonical order
        Eigen::MatrixXcd T;                  // T(bra, ket) = bra row, ket column
        std::unordered_map<ChannelKey, int, ChannelKeyHash> index;

        int find(const ChannelKey& k) const {
            auto it = index.find(k);
            return it == index.end() ? -1 : it->second;
        }
    };

    double E_k_cm1 = 0.0;
    double E_total_cm1 = 0.0;
    double mu_amu = 0.0;
    std::string convention = "T=1-S;CondonShortley";
    Provenance provenance = Provenance::synthetic;
    std::string potential_hash = "none";
    BasisTruncation trunc;
    std::vector<JBlock> blocks;

    const JBlock* block(HalfInt J) const;
    // T element or std::nullopt when either channel is absent from the block.
    std::optional<std::complex<double>> lookup(HalfInt J, const ChannelKey& bra,
                                               const ChannelKey& ket) const;
    int max_J() const;
    void rebuild_indexes();
    // Closed-under-exchange and finite-value structural checks.
    void validate() const;
};

// Builds a block from a solved S-matrix block (T = I - S).
TMatrixSet::JBlock block_from_smatrix(const SMatrixBlock& s);

TMatrixSet assemble(const std::vector<SMatrixBlock>& blocks, const CollisionSpec& spec,
                    const PotentialModel& model);

// Line-oriented structured text, one record per (J, bra, ket) with explicit
// quantum numbers and 17-significant-digit reals; NaN/Inf rejected both ways.
void save_tmatrix(const std::string& path, const TMatrixSet& set);
TMatrixSet load_tmatrix(const std::string& path);

// Per-J random unitary symmetric S built in the exchange- and parity-adapted
// basis, transformed back to the distinguishable-channel basis; T = 1 - S.
// Parity blocks ((-1)^{j1+j2+l} conserved) are always imposed; when
// exchange_symmetrize is set the exchange relation
//   T(b~|a~) = (-1)^{j1+j2+j12+l+j1'+j2'+j12'+l'} T(b|a)
// holds by construction.  Same seed, same set.
TMatrixSet synthesize_unitary(double E_k_cm1, const BasisTruncation& trunc, int J_max,
                              double mu_amu, std::uint64_t seed, bool exchange_symmetrize = true,
                              const MoleculeLabels& mol1 = {HalfInt(2), HalfInt(0), 0},
                              const MoleculeLabels& mol2 = {HalfInt(0), HalfInt(0), 0},
                              const PhysicalConstants& pc = default_constants());

struct ExchangeOffender {
    int J;
    ChannelKey bra, ket;
    std::complex<double> direct, exchanged;
    double deviation;  // relative to the block max magnitude
};

struct ExchangeReport {
    double max_relative_deviation = 0.0;
    double reference_magnitude = 0.0;  // max |T| over compared entries
    int entries_compared = 0;
    std::vector<ExchangeOffender> worst;  // sorted, largest first
};

// Checks T(bra | ket) = (-1)^{j12'} T(bra | exchanged ket) over all stored
// J, l, l' for a self-exchanged bra pair (j1',v1') = (j2',v2'), the form the
// identical-pair final state obeys.  Deviations are relative to the largest
// compared |T|.  Throws input_error when bra is not self-exchanged or when
// exchange partners are missing.
ExchangeReport check_exchange_relation(const TMatrixSet& set, HalfInt bra_j, int bra_v,
                                       HalfInt ket_j1, int ket_v1, HalfInt ket_j2, int ket_v2);

}  // namespace escat
