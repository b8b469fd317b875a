#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "macesim/config.hpp"
#include "macesim/geometry.hpp"

namespace macesim {

// eta * prev + (1 - eta) * sample, re-symmetrized.
MatrixXcd exp_update(const MatrixXcd& prev, const MatrixXcd& sample_outer, double eta);

// Eigenvalue clipping to the Frobenius-nearest Hermitian PSD matrix; returns
// the input unchanged when it is already PSD.
MatrixXcd psd_project(const MatrixXcd& H);

// Covariance recovery: (tau_p Q_tk + tau_p p_k hbar hbar^H - Q) scaled by
// 1/(p_k tau_p (tau_p - 1)), then PSD-projected.  The same combination works
// at local, central and fused dimensions.
MatrixXcd recover_rbreve(const MatrixXcd& Q_tk, const MatrixXcd& Q, const VectorXcd& hbar,
                         double p_k, int tau_p);

// Joint consistency repair for an estimated (Rbreve, Q_tk) pair: any exact
// pair satisfies p_k tau_p Rbreve <= Q_tk, which keeps the LMMSE gain
// bounded.  Averaging noise breaks that bound and lets the gain blow up on
// weak links, so the whitened numerator p_k tau_p Q^{-1/2} Rbreve Q^{-1/2}
// is eigenvalue-clipped to [0, 1].  A pair that already satisfies the bound
// is returned unchanged.
MatrixXcd consistent_rbreve(const MatrixXcd& rbreve, const MatrixXcd& q_tk, double p_k,
                            int tau_p);

// Scales a recovered NLoS covariance down so its trace does not exceed the
// known channel power (tr Rbreve <= tr R = N beta; the network knows beta,
// it drives master assignment).  Without this bound, strong-interferer
// leakage in the averaged statistics can inflate a weak UE's numerator by
// orders of magnitude.
MatrixXcd cap_trace(MatrixXcd rbreve, double cap);

// Same bound for a tracked LoS mean: ||hbar||^2 <= N beta.
VectorXcd cap_norm(VectorXcd hbar, double cap);

// Closed-form received-signal correlation, Q_j = tau_p sum_i p_i R_{j,i}
// + tau_p sigma^2 I, and its LN-dimensional central counterpart.
MatrixXcd true_q_local(const NetworkStats& stats, const SimConfig& cfg, int j);
MatrixXcd true_q_central(const NetworkStats& stats, const SimConfig& cfg);

// Closed-form despread correlation, p_k tau_p Rbreve + sum_{i != k} p_i R_i
// + sigma^2 I, at local and central scope.  The master (fused) scope lives
// with the fusion machinery in estimators.hpp.
MatrixXcd true_q_tk_local(const NetworkStats& stats, const SimConfig& cfg, int j, int k);
MatrixXcd true_q_tk_central(const NetworkStats& stats, const SimConfig& cfg, int k);

// Hermitian linear solver with the tracker regularization policy: if the
// LDLT condition estimate exceeds 1e12, add eps * tr/dim * I (eps = 1e-9)
// and refactor.  Failures name the caller-supplied context.
class HermitianSolver {
public:
    explicit HermitianSolver(MatrixXcd A, std::string context = {});

    [[nodiscard]] VectorXcd solve(const VectorXcd& b) const;
    [[nodiscard]] MatrixXcd solve(const MatrixXcd& B) const;
    [[nodiscard]] bool regularized() const { return regularized_; }

private:
    Eigen::LDLT<MatrixXcd> ldlt_;
    Eigen::VectorXd scale_;
    std::string context_;
    bool regularized_ = false;
    bool zero_ = false;
};

// Running LoS mean: average of y / sqrt(p_k tau_p) over the blocks seen,
// optionally frozen after B blocks.
class LosMean {
public:
    void init(int dim) {
        sum_ = VectorXcd::Zero(dim);
        count_ = 0;
    }
    void update(const VectorXcd& y, const SimConfig& cfg) {
        if (cfg.los_mode == LosMode::frozen && count_ >= cfg.B) return;
        sum_ += y;
        ++count_;
    }
    [[nodiscard]] VectorXcd mean(double p_k, int tau_p) const {
        if (count_ == 0) return VectorXcd::Zero(sum_.size());
        return sum_ / (std::sqrt(p_k * double(tau_p)) * double(count_));
    }
    [[nodiscard]] long count() const { return count_; }

private:
    VectorXcd sum_;
    long count_ = 0;
};

enum class AveragingMode { exponential, running_mean };

// Exponentially averaged second-order statistics of one estimation scope
// (one AP, the CPU, or one UE's master).  Sequential over the block index.
struct TrackedStats {
    MatrixXcd Qhat;                  // received-signal correlation
    std::vector<MatrixXcd> Qhat_tk;  // despread correlation per UE
    std::vector<LosMean> hbar_hat;   // despread running mean per UE
    long blocks_seen = 0;
    AveragingMode mode = AveragingMode::exponential;

    // dim is the scope dimension (N, LN or N+L-1); initial values are the
    // noise floor, tau_p sigma^2 I and sigma^2 I.
    void init(int dim, int num_ues, const SimConfig& cfg);

    void update_received(const MatrixXcd& Y, double eta);
    // Updates the LoS running mean first, then averages the outer product of
    // the sample centered on the updated mean.  The closed-form despread
    // correlation (and the LMMSE denominator) is the centered covariance, so
    // the raw y y^H average would converge to Q_tk + p_k tau_p hbar hbar^H
    // and poison the covariance recovery.
    void update_despread(int k, const VectorXcd& y, double eta, const SimConfig& cfg);
    void finish_block() { ++blocks_seen; }
};

// Debug dumps of tracked matrices: row-major (re, im) float64 pairs,
// little-endian, or a plain-text CSV with "re+imi" cells.
void dump_matrix_binary(const std::string& path, const MatrixXcd& M);
void dump_matrix_csv(const std::string& path, const MatrixXcd& M);
MatrixXcd load_matrix_binary(const std::string& path, int rows, int cols);

}  // namespace macesim
