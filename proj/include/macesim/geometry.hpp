#pragma once

#include <Eigen/Dense>
#include <vector>

#include "macesim/config.hpp"
#include "macesim/rng.hpp"

namespace macesim {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Complex = std::complex<double>;

struct Positions {
    std::vector<Eigen::Vector2d> aps;
    std::vector<Eigen::Vector2d> ues;
};

// Per-(AP, UE) channel statistics: deterministic LoS mean, NLoS correlation,
// and the large-scale coefficient beta = tr(R)/N.  `nlos_factor` caches a
// matrix F with F F^H = Rbreve, used when sampling NLoS realizations.
struct LinkStats {
    VectorXcd hbar;        // N
    MatrixXcd rbreve;      // N x N, Hermitian PSD
    MatrixXcd nlos_factor; // N x N
    double beta = 0.0;
};

class NetworkStats {
public:
    NetworkStats(Positions positions, int L, int K, int N)
        : positions_(std::move(positions)), L_(L), K_(K), N_(N), links_(size_t(L) * K) {}

    [[nodiscard]] int num_aps() const { return L_; }
    [[nodiscard]] int num_ues() const { return K_; }
    [[nodiscard]] int antennas() const { return N_; }
    [[nodiscard]] const Positions& positions() const { return positions_; }

    LinkStats& link(int j, int k) { return links_[size_t(j) * K_ + k]; }
    [[nodiscard]] const LinkStats& link(int j, int k) const { return links_[size_t(j) * K_ + k]; }

    // R_{j,k} = hbar hbar^H + Rbreve.
    [[nodiscard]] MatrixXcd correlation(int j, int k) const {
        const auto& s = link(j, k);
        return s.hbar * s.hbar.adjoint() + s.rbreve;
    }

private:
    Positions positions_;
    int L_, K_, N_;
    std::vector<LinkStats> links_;
};

// Stacked statistics of one UE's collective channel across all APs.
struct CollectiveStats {
    VectorXcd hbar;    // LN
    MatrixXcd rbreve;  // LN x LN, block diagonal
    MatrixXcd r;       // LN x LN, hbar hbar^H + rbreve
};

// One coherence block's channel draws, h(j,k) = hbar + nlos_factor * w.
struct ChannelRealization {
    int L = 0, K = 0, N = 0;
    std::vector<VectorXcd> h;  // indexed j*K + k

    [[nodiscard]] const VectorXcd& at(int j, int k) const { return h[size_t(j) * K + k]; }
    [[nodiscard]] VectorXcd collective(int k) const {
        VectorXcd out(size_t(L) * N);
        for (int j = 0; j < L; ++j) out.segment(size_t(j) * N, N) = at(j, k);
        return out;
    }
};

// L AP positions, then K UE positions, uniform i.i.d. in [0, area_m]^2.
Positions place_network(const SimConfig& cfg, RngStream& rng);

// Path loss, Rician factor, LoS steering vector and local-scattering NLoS
// correlation for every (AP, UE) pair.  Consumes one uniform per pair from
// `rng` for the LoS common phase.
NetworkStats build_stats(const Positions& positions, const SimConfig& cfg, RngStream& rng);

CollectiveStats collective(const NetworkStats& stats, int k);

ChannelRealization sample_channels(const NetworkStats& stats, RngStream& rng);

// argmax_j beta_{j,k}; ties broken by smallest AP index.
int assign_master(const NetworkStats& stats, int k);

}  // namespace macesim
