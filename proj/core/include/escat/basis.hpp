#pragma once

#include <cstdint>
#include <vector>

#include "escat/constants.hpp"
#include "escat/halfint.hpp"

namespace escat {

// One rovibrational level of the two-parameter rigid-rotor/harmonic model:
// E = B j(j+1) + vib_spacing * v.
struct MolecularLevel {
    HalfInt j;
    int v = 0;
    double energy_cm1 = 0.0;

    friend bool operator==(const MolecularLevel&, const MolecularLevel&) = default;
};

// (j, m, v) labels of one molecule of the colliding pair.
struct MoleculeLabels {
    HalfInt j;
    HalfInt m;
    int v = 0;

    friend bool operator==(const MoleculeLabels&, const MoleculeLabels&) = default;
};

// One asymptotic channel (j1 v1 j2 v2 j12 l) inside a total-J block.
// k_A_inv holds the open-channel wavenumber, or the closed-channel decay
// constant magnitude when open == false.
struct ChannelState {
    MolecularLevel mol1;
    MolecularLevel mol2;
    HalfInt j12;
    HalfInt l;
    HalfInt J;
    double channel_energy_cm1 = 0.0;
    double k_A_inv = 0.0;
    bool open = false;
};

// Quantum-number key of a channel, independent of energies; used for
// T-matrix lookup and serialization.
struct ChannelKey {
    int tj1 = 0, v1 = 0, tj2 = 0, v2 = 0, tj12 = 0, tl = 0;

    friend auto operator<=>(const ChannelKey&, const ChannelKey&) = default;

    std::uint64_t packed() const {
        auto u = [](int x) { return static_cast<std::uint64_t>(x) & 0x3ff; };
        return (u(tj1) << 50) | (u(v1) << 40) | (u(tj2) << 30) | (u(v2) << 20) | (u(tj12) << 10) |
               u(tl);
    }
    ChannelKey exchanged() const { return {tj2, v2, tj1, v1, tj12, tl}; }
    bool self_exchanged() const { return tj1 == tj2 && v1 == v2; }
};

ChannelKey key_of(const ChannelState& c);

struct ChannelKeyHash {
    std::size_t operator()(const ChannelKey& k) const noexcept {
        std::uint64_t x = k.packed();
        x ^= x >> 33;
        x *= 0xff51afd7ed558ccdULL;
        x ^= x >> 33;
        return static_cast<std::size_t>(x);
    }
};

// Basis truncation and level-model parameters; enough to rebuild an
// identical channel list anywhere.
struct BasisTruncation {
    int j_max = 4;
    int v_max = 0;
    bool para_only = true;
    double B_cm1 = 59.3;
    double vib_spacing_cm1 = 4161.0;
};

// Collision setup: total energy bookkeeping plus basis truncation.
// E_total = E_k + E(j1,v1) + E(j2,v2).
struct CollisionSpec {
    double E_k_cm1 = 4.0;
    MoleculeLabels mol1;
    MoleculeLabels mol2;
    BasisTruncation trunc;
    int J_max = 8;
    double mu_amu = 1.00794;

    // Throws input_error on E_k <= 0 or identical (j,m,v) label pairs
    // (identical labels cannot host pair entanglement).
    void validate() const;
    double internal_energy_cm1() const;
    double total_energy_cm1() const { return E_k_cm1 + internal_energy_cm1(); }
};

// Rigid-rotor/harmonic level list; para_only keeps even j.
std::vector<MolecularLevel> enumerate_levels(int j_max, int v_max, double B_cm1,
                                             double vib_spacing_cm1, bool para_only);

double level_energy(HalfInt j, int v, const BasisTruncation& t);

struct Wavenumber {
    double value_A_inv = 0.0;  // k when open, decay constant magnitude when closed
    bool open = false;
};

// k = sqrt((E_total - E_channel) * mu / hbar2_over_2amuA2_cm1); a negative
// argument flags the channel closed and stores the magnitude.
Wavenumber wavenumber(double E_total_cm1, double E_channel_cm1, double mu_amu,
                      const PhysicalConstants& pc = default_constants());

// Every (j1 v1 j2 v2 j12 l) tuple satisfying the triangle rules and the
// truncation, with channel energies and wavenumbers at the spec's total
// energy.  Ordering is the documented canonical sort key
// (v1, j1, v2, j2, j12, l) ascending, so exchanged partners appear at
// mirror-symmetric positions and serialization is stable.
// Throws input_error when the basis comes out empty.
std::vector<ChannelState> build_channel_basis(const CollisionSpec& spec, HalfInt J,
                                              const PhysicalConstants& pc = default_constants());

// Same, but with the total energy given directly (used for satellite pairs
// whose internal energy differs from the entangled pair's).
std::vector<ChannelState> build_channel_basis_at_energy(double E_total_cm1,
                                                        const BasisTruncation& trunc, HalfInt J,
                                                        double mu_amu,
                                                        const PhysicalConstants& pc = default_constants());

}  // namespace escat
