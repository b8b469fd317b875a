#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "macesim/config.hpp"
#include "macesim/geometry.hpp"
#include "macesim/metrics.hpp"
#include "macesim/pilot.hpp"
#include "macesim/tracker.hpp"

namespace macesim {

struct LmmseInputs {
    VectorXcd hbar;
    MatrixXcd rbreve;  // PSD numerator covariance
    MatrixXcd q_tk;    // despread covariance
    VectorXcd y;
    double p_k = 0.0;
    int tau_p = 0;
};

struct ChannelEstimate {
    VectorXcd vec;
    Scheme scheme = Scheme::local;
    int ap = -1;
    int ue = -1;
};

// hbar + sqrt(p_k tau_p) * Rbreve * Q_tk^{-1} (y - sqrt(p_k tau_p) hbar),
// via a regularized Hermitian solve.  `context` names the scope/block in
// failure messages.
VectorXcd lmmse(const LmmseInputs& in, const std::string& context = {});

// Fusion vectors of one UE: v[j] for every ASAP j, identity block at the
// master.  Fused quantities are assembled blockwise, so the master's rows
// are plain copies and the L=1 case degenerates to the local pipeline
// bit-for-bit.
struct FusionSet {
    int master = 0;
    int N = 0;
    std::vector<VectorXcd> v;  // size L; v[master] unused

    [[nodiscard]] int num_aps() const { return int(v.size()); }
    [[nodiscard]] int fused_dim() const { return N + num_aps() - 1; }
    // Row offset of AP j's block inside a fused vector (length 1 for
    // ASAPs, N for the master).
    [[nodiscard]] int block_offset(int j) const {
        return j <= master ? j : master + N + (j - master - 1);
    }
    [[nodiscard]] int master_offset() const { return master; }
};

FusionSet build_fusion(const std::vector<VectorXcd>& local_estimates, int master,
                       bool normalize = false);

// (V^diag)^H applied to per-AP received matrices / despread vectors.
MatrixXcd fuse_received(const FusionSet& fusion, const std::vector<MatrixXcd>& Y);
VectorXcd fuse_despread(const FusionSet& fusion, const std::vector<VectorXcd>& y_local);

// Fused statistics of UE i: zbar = (V^diag)^H hbar_i and the block-diagonal
// NLoS covariance (V^diag)^H blkdiag{Rbreve_{j,i}} V^diag.
VectorXcd fused_mean(const FusionSet& fusion, const NetworkStats& stats, int i);
MatrixXcd fused_rbreve(const FusionSet& fusion, const NetworkStats& stats, int i);
// (V^diag)^H V^diag, the exact despread-noise shape (diagonal with the
// ASAP norms and an identity master block).
MatrixXcd fused_gram(const FusionSet& fusion);

// Closed-form fused correlation matrices conditioned on the realized fusion
// vectors; the noise terms use the exact gram form.
MatrixXcd fused_true_q(const NetworkStats& stats, const SimConfig& cfg, const FusionSet& fusion);
MatrixXcd fused_true_q_tk(const NetworkStats& stats, const SimConfig& cfg,
                          const FusionSet& fusion, int k);

// tr of the selected diagonal block of (Rbreve - p_k tau_p Rbreve Q_tk^{-1}
// Rbreve), normalized by the same block trace of R.  `offset`/`length`
// select the block (AP j locally, AP l centrally, the master slice fused).
double theoretical_nmse(const MatrixXcd& rbreve, const MatrixXcd& r, const MatrixXcd& q_tk,
                        double p_k, int tau_p, int offset, int length);

// True-statistics pipelines for one synthesized block.  These are the
// reference paths used by tests; the harness runs the same math through
// per-realization caches.
ChannelEstimate local_estimate_true(const NetworkStats& stats, const SimConfig& cfg,
                                    const PilotBlock& block, const PilotBook& book, int j,
                                    int k);
// Collective LMMSE at dimension LN; extract_block picks AP l's N entries.
VectorXcd central_estimate_true(const NetworkStats& stats, const SimConfig& cfg,
                                const PilotBlock& block, const PilotBook& book, int k);
VectorXcd extract_block(const VectorXcd& collective_estimate, int l, int N);

// Local estimates at every AP (fusion vectors), then the fused LMMSE and
// master-slice extraction.
ChannelEstimate mace_estimate_true(const NetworkStats& stats, const SimConfig& cfg,
                                   const PilotBlock& block, const PilotBook& book, int k,
                                   int master);

}  // namespace macesim
