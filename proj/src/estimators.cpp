#include "macesim/estimators.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace macesim {

VectorXcd lmmse(const LmmseInputs& in, const std::string& context) {
    const auto dim = in.y.size();
    if (in.hbar.size() != dim || in.rbreve.rows() != dim || in.q_tk.rows() != dim)
        throw std::invalid_argument("lmmse: dimension mismatch");
    if (in.rbreve.norm() == 0.0) return in.hbar;  // fully deterministic channel
    const double root = std::sqrt(in.p_k * double(in.tau_p));
    const VectorXcd innovation = in.y - root * in.hbar;
    if (innovation.norm() == 0.0) return in.hbar;
    HermitianSolver solver(in.q_tk, context);
    return in.hbar + root * (in.rbreve * solver.solve(innovation));
}

FusionSet build_fusion(const std::vector<VectorXcd>& local_estimates, int master,
                       bool normalize) {
    if (master < 0 || master >= int(local_estimates.size()))
        throw std::invalid_argument("build_fusion: master index out of range");
    FusionSet fusion;
    fusion.master = master;
    fusion.N = int(local_estimates[master].size());
    fusion.v = local_estimates;
    if (normalize) {
        for (int j = 0; j < fusion.num_aps(); ++j) {
            if (j == master) continue;
            const double norm = fusion.v[j].norm();
            if (norm > 0.0) fusion.v[j] /= norm;
        }
    }
    return fusion;
}

MatrixXcd fuse_received(const FusionSet& fusion, const std::vector<MatrixXcd>& Y) {
    if (int(Y.size()) != fusion.num_aps())
        throw std::invalid_argument("fuse_received: AP count mismatch");
    MatrixXcd out(fusion.fused_dim(), Y[0].cols());
    for (int j = 0; j < fusion.num_aps(); ++j) {
        if (j == fusion.master)
            out.middleRows(fusion.block_offset(j), fusion.N) = Y[j];
        else
            out.row(fusion.block_offset(j)) = fusion.v[j].adjoint() * Y[j];
    }
    return out;
}

VectorXcd fuse_despread(const FusionSet& fusion, const std::vector<VectorXcd>& y_local) {
    if (int(y_local.size()) != fusion.num_aps())
        throw std::invalid_argument("fuse_despread: AP count mismatch");
    VectorXcd out(fusion.fused_dim());
    for (int j = 0; j < fusion.num_aps(); ++j) {
        if (j == fusion.master)
            out.segment(fusion.block_offset(j), fusion.N) = y_local[j];
        else
            out(fusion.block_offset(j)) = fusion.v[j].dot(y_local[j]);
    }
    return out;
}

VectorXcd fused_mean(const FusionSet& fusion, const NetworkStats& stats, int i) {
    VectorXcd out(fusion.fused_dim());
    for (int j = 0; j < fusion.num_aps(); ++j) {
        if (j == fusion.master)
            out.segment(fusion.block_offset(j), fusion.N) = stats.link(j, i).hbar;
        else
            out(fusion.block_offset(j)) = fusion.v[j].dot(stats.link(j, i).hbar);
    }
    return out;
}

MatrixXcd fused_rbreve(const FusionSet& fusion, const NetworkStats& stats, int i) {
    MatrixXcd out = MatrixXcd::Zero(fusion.fused_dim(), fusion.fused_dim());
    for (int j = 0; j < fusion.num_aps(); ++j) {
        const int off = fusion.block_offset(j);
        if (j == fusion.master) {
            out.block(off, off, fusion.N, fusion.N) = stats.link(j, i).rbreve;
        } else {
            const Complex q = fusion.v[j].dot(stats.link(j, i).rbreve * fusion.v[j]);
            out(off, off) = Complex(q.real(), 0.0);
        }
    }
    return out;
}

MatrixXcd fused_gram(const FusionSet& fusion) {
    MatrixXcd out = MatrixXcd::Zero(fusion.fused_dim(), fusion.fused_dim());
    for (int j = 0; j < fusion.num_aps(); ++j) {
        const int off = fusion.block_offset(j);
        if (j == fusion.master)
            out.block(off, off, fusion.N, fusion.N).setIdentity();
        else
            out(off, off) = fusion.v[j].squaredNorm();
    }
    return out;
}

MatrixXcd fused_true_q(const NetworkStats& stats, const SimConfig& cfg,
                       const FusionSet& fusion) {
    const double tp = double(cfg.tau_p);
    MatrixXcd Q = (tp * cfg.sigma2) * fused_gram(fusion);
    for (int i = 0; i < stats.num_ues(); ++i) {
        const VectorXcd zbar = fused_mean(fusion, stats, i);
        Q += (tp * cfg.p) * (zbar * zbar.adjoint() + fused_rbreve(fusion, stats, i));
    }
    return Q;
}

MatrixXcd fused_true_q_tk(const NetworkStats& stats, const SimConfig& cfg,
                          const FusionSet& fusion, int k) {
    const double tp = double(cfg.tau_p);
    MatrixXcd Q = cfg.sigma2 * fused_gram(fusion);
    Q += (cfg.p * tp) * fused_rbreve(fusion, stats, k);
    for (int i = 0; i < stats.num_ues(); ++i) {
        if (i == k) continue;
        const VectorXcd zbar = fused_mean(fusion, stats, i);
        Q += cfg.p * (zbar * zbar.adjoint() + fused_rbreve(fusion, stats, i));
    }
    return Q;
}

double theoretical_nmse(const MatrixXcd& rbreve, const MatrixXcd& r, const MatrixXcd& q_tk,
                        double p_k, int tau_p, int offset, int length) {
    if (rbreve.norm() == 0.0) return 0.0;  // fully deterministic channel
    HermitianSolver solver(q_tk, "theoretical_nmse");
    const MatrixXcd err_cov =
        rbreve - (p_k * double(tau_p)) * (rbreve * solver.solve(rbreve));
    const MatrixXcd block = 0.5 * (err_cov.block(offset, offset, length, length) +
                                   err_cov.block(offset, offset, length, length).adjoint());
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(block);
    const double scale = std::max(rbreve.real().trace() / double(rbreve.rows()), 1e-300);
    if (eig.eigenvalues().minCoeff() < -1e-10 * scale)
        throw std::runtime_error("theoretical_nmse: error covariance is not PSD");
    const double num = block.real().trace();
    const double den = r.block(offset, offset, length, length).real().trace();
    return num / den;
}

ChannelEstimate local_estimate_true(const NetworkStats& stats, const SimConfig& cfg,
                                    const PilotBlock& block, const PilotBook& book, int j,
                                    int k) {
    const auto& link = stats.link(j, k);
    LmmseInputs in;
    in.hbar = link.hbar;
    in.rbreve = link.rbreve;
    in.q_tk = true_q_tk_local(stats, cfg, j, k);
    in.y = despread_local(block.Y[j], k, block.assignment, book).y;
    in.p_k = cfg.p;
    in.tau_p = cfg.tau_p;
    ChannelEstimate est;
    est.vec = lmmse(in, "local AP " + std::to_string(j) + " UE " + std::to_string(k));
    est.scheme = Scheme::local;
    est.ap = j;
    est.ue = k;
    return est;
}

VectorXcd central_estimate_true(const NetworkStats& stats, const SimConfig& cfg,
                                const PilotBlock& block, const PilotBook& book, int k) {
    const CollectiveStats coll = collective(stats, k);
    LmmseInputs in;
    in.hbar = coll.hbar;
    in.rbreve = coll.rbreve;
    in.q_tk = true_q_tk_central(stats, cfg, k);
    in.y = despread_central(block, k, book).y;
    in.p_k = cfg.p;
    in.tau_p = cfg.tau_p;
    return lmmse(in, "central UE " + std::to_string(k));
}

VectorXcd extract_block(const VectorXcd& collective_estimate, int l, int N) {
    return collective_estimate.segment(Eigen::Index(l) * N, N);
}

ChannelEstimate mace_estimate_true(const NetworkStats& stats, const SimConfig& cfg,
                                   const PilotBlock& block, const PilotBook& book, int k,
                                   int master) {
    const int L = stats.num_aps();
    if (master < 0 || master >= L)
        throw std::invalid_argument("mace_estimate_true: master index out of range");

    std::vector<VectorXcd> locals(L), y_local(L);
    for (int j = 0; j < L; ++j) {
        locals[j] = local_estimate_true(stats, cfg, block, book, j, k).vec;
        y_local[j] = despread_local(block.Y[j], k, block.assignment, book).y;
    }
    const FusionSet fusion = build_fusion(locals, master, cfg.normalize_fusion);

    LmmseInputs in;
    in.hbar = fused_mean(fusion, stats, k);
    in.rbreve = fused_rbreve(fusion, stats, k);
    in.q_tk = fused_true_q_tk(stats, cfg, fusion, k);
    in.y = fuse_despread(fusion, y_local);
    in.p_k = cfg.p;
    in.tau_p = cfg.tau_p;
    const VectorXcd z_est = lmmse(in, "mace UE " + std::to_string(k));

    ChannelEstimate est;
    est.vec = z_est.segment(fusion.master_offset(), fusion.N);
    est.scheme = Scheme::mace;
    est.ap = master;
    est.ue = k;
    return est;
}

}  // namespace macesim
