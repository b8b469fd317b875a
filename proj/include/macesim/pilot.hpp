#pragma once

#include <Eigen/Dense>
#include <vector>

#include "macesim/config.hpp"
#include "macesim/geometry.hpp"
#include "macesim/rng.hpp"

namespace macesim {

// tau_p mutually orthogonal pilots as rows, ||phi_t||^2 = tau_p.
struct PilotBook {
    MatrixXcd phi;  // tau_p x tau_p

    [[nodiscard]] int tau_p() const { return int(phi.rows()); }
    [[nodiscard]] Eigen::RowVectorXcd pilot(int t) const { return phi.row(t); }
};

// Per-block random pilot indices (0-based) and +/-1 scaling signs.
struct PilotAssignment {
    std::vector<int> t;      // K, each in {0, ..., tau_p-1}
    std::vector<int> gamma;  // K, each +1 or -1
};

// Everything synthesized for one coherence block.  Y[j] reconstructs
// bit-exactly as sum_i sqrt(p_i) h(j,i) gamma_i phi_{t_i}^T (i ascending)
// plus noise[j] added last.
struct PilotBlock {
    PilotAssignment assignment;
    ChannelRealization channels;
    std::vector<MatrixXcd> noise;  // per AP, N x tau_p
    std::vector<MatrixXcd> Y;      // per AP, N x tau_p
};

struct DespreadSignal {
    VectorXcd y;  // N (local), LN (central) or N+L-1 (master)
    int ue = -1;
};

// Unitary-family pilot book: DFT rows scaled to ||phi||^2 = tau_p.
PilotBook make_pilot_book(int tau_p);

// i.i.d. uniform pilot indices, i.i.d. +/-1 signs (indices drawn for all
// UEs first, then signs).
PilotAssignment draw_assignment(int K, int tau_p, RngStream& rng);

// Superimposes every UE's sign-scaled pilot through its channel and adds
// fresh noise draws from `rng`.
PilotBlock synthesize_received(const ChannelRealization& channels,
                               const PilotAssignment& assignment, const PilotBook& book,
                               const SimConfig& cfg, RngStream& rng);

// y = Y * conj(gamma_k phi_{t_k}) / sqrt(tau_p).
DespreadSignal despread_local(const MatrixXcd& Y_j, int k, const PilotAssignment& assignment,
                              const PilotBook& book);

// Stacked despread across APs; row segment j equals despread_local for AP j
// bit-for-bit.
DespreadSignal despread_central(const PilotBlock& block, int k, const PilotBook& book);

// Interference coefficient delta_i of UE i onto UE k's despread signal:
// 0 when the pilots differ, gamma_k * gamma_i when they collide.
int delta_oracle(const PilotAssignment& assignment, int i, int k);

}  // namespace macesim
