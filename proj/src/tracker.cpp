#include "macesim/tracker.hpp"

#include <Eigen/Eigenvalues>
#include <fstream>
#include <stdexcept>

namespace macesim {

namespace {

MatrixXcd hermitize(const MatrixXcd& A) { return 0.5 * (A + A.adjoint()); }

}  // namespace

MatrixXcd exp_update(const MatrixXcd& prev, const MatrixXcd& sample_outer, double eta) {
    if (prev.rows() != sample_outer.rows() || prev.cols() != sample_outer.cols())
        throw std::invalid_argument("exp_update: dimension mismatch");
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("exp_update: eta not in (0,1)");
    return hermitize(eta * prev + (1.0 - eta) * sample_outer);
}

MatrixXcd psd_project(const MatrixXcd& H) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(hermitize(H));
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("psd_project: eigendecomposition failed");
    if (eig.eigenvalues().minCoeff() >= 0.0) return H;
    Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
    return hermitize(eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().adjoint());
}

MatrixXcd recover_rbreve(const MatrixXcd& Q_tk, const MatrixXcd& Q, const VectorXcd& hbar,
                         double p_k, int tau_p) {
    if (tau_p < 2) throw std::invalid_argument("recover_rbreve: tau_p must be >= 2");
    const double tp = double(tau_p);
    const MatrixXcd combo =
        (tp * Q_tk + (tp * p_k) * (hbar * hbar.adjoint()) - Q) / (p_k * tp * (tp - 1.0));
    return psd_project(hermitize(combo));
}

MatrixXcd consistent_rbreve(const MatrixXcd& rbreve, const MatrixXcd& q_tk, double p_k,
                            int tau_p) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eig_q(hermitize(q_tk));
    if (eig_q.info() != Eigen::Success)
        throw std::runtime_error("consistent_rbreve: eigendecomposition failed");
    const double lam_max = eig_q.eigenvalues().maxCoeff();
    if (!(lam_max > 0.0)) return rbreve;
    Eigen::VectorXd lam = eig_q.eigenvalues().cwiseMax(1e-14 * lam_max);

    const MatrixXcd& U = eig_q.eigenvectors();
    const MatrixXcd white =
        U * lam.cwiseSqrt().cwiseInverse().asDiagonal() * U.adjoint();
    const MatrixXcd M =
        hermitize((p_k * double(tau_p)) * (white * rbreve * white));
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eig_m(M);
    if (eig_m.info() != Eigen::Success)
        throw std::runtime_error("consistent_rbreve: eigendecomposition failed");
    if (eig_m.eigenvalues().minCoeff() >= 0.0 && eig_m.eigenvalues().maxCoeff() <= 1.0)
        return rbreve;

    Eigen::VectorXd clipped = eig_m.eigenvalues().cwiseMax(0.0).cwiseMin(1.0);
    const MatrixXcd M_star =
        eig_m.eigenvectors() * clipped.asDiagonal() * eig_m.eigenvectors().adjoint();
    const MatrixXcd color = U * lam.cwiseSqrt().asDiagonal() * U.adjoint();
    return hermitize((color * M_star * color) / (p_k * double(tau_p)));
}

MatrixXcd cap_trace(MatrixXcd rbreve, double cap) {
    const double tr = rbreve.real().trace();
    if (tr > cap && tr > 0.0) rbreve *= cap / tr;
    return rbreve;
}

VectorXcd cap_norm(VectorXcd hbar, double cap) {
    const double sq = hbar.squaredNorm();
    if (sq > cap && sq > 0.0) hbar *= std::sqrt(cap / sq);
    return hbar;
}

MatrixXcd true_q_local(const NetworkStats& stats, const SimConfig& cfg, int j) {
    const int N = stats.antennas();
    const double tp = double(cfg.tau_p);
    MatrixXcd Q = (tp * cfg.sigma2) * MatrixXcd::Identity(N, N);
    for (int i = 0; i < stats.num_ues(); ++i) {
        const auto& link = stats.link(j, i);
        Q += (tp * cfg.p) * (link.hbar * link.hbar.adjoint() + link.rbreve);
    }
    return Q;
}

MatrixXcd true_q_central(const NetworkStats& stats, const SimConfig& cfg) {
    const Eigen::Index dim = Eigen::Index(stats.num_aps()) * stats.antennas();
    const double tp = double(cfg.tau_p);
    MatrixXcd Q = (tp * cfg.sigma2) * MatrixXcd::Identity(dim, dim);
    for (int i = 0; i < stats.num_ues(); ++i) {
        const CollectiveStats coll = collective(stats, i);
        Q += (tp * cfg.p) * (coll.hbar * coll.hbar.adjoint() + coll.rbreve);
    }
    return Q;
}

MatrixXcd true_q_tk_local(const NetworkStats& stats, const SimConfig& cfg, int j, int k) {
    const int N = stats.antennas();
    const double tp = double(cfg.tau_p);
    MatrixXcd Q = cfg.sigma2 * MatrixXcd::Identity(N, N);
    Q += (cfg.p * tp) * stats.link(j, k).rbreve;
    for (int i = 0; i < stats.num_ues(); ++i) {
        if (i == k) continue;
        const auto& link = stats.link(j, i);
        Q += cfg.p * (link.hbar * link.hbar.adjoint() + link.rbreve);
    }
    return Q;
}

MatrixXcd true_q_tk_central(const NetworkStats& stats, const SimConfig& cfg, int k) {
    const Eigen::Index dim = Eigen::Index(stats.num_aps()) * stats.antennas();
    const double tp = double(cfg.tau_p);
    MatrixXcd Q = cfg.sigma2 * MatrixXcd::Identity(dim, dim);
    Q += (cfg.p * tp) * collective(stats, k).rbreve;
    for (int i = 0; i < stats.num_ues(); ++i) {
        if (i == k) continue;
        const CollectiveStats coll = collective(stats, i);
        Q += cfg.p * (coll.hbar * coll.hbar.adjoint() + coll.rbreve);
    }
    return Q;
}

HermitianSolver::HermitianSolver(MatrixXcd A, std::string context)
    : context_(std::move(context)) {
    const Eigen::Index n = A.rows();
    // An identically zero covariance means no innovation energy was ever
    // observed; the solve acts as the pseudo-inverse (zero gain).
    if (A.norm() == 0.0) {
        zero_ = true;
        scale_ = Eigen::VectorXd::Ones(n);
        return;
    }
    // Symmetric Jacobi equilibration: fused systems mix rows whose natural
    // scales differ by many decades, which would otherwise dominate the LDLT
    // error and the condition estimate.
    scale_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = A(i, i).real();
        scale_(i) = d > 0.0 ? 1.0 / std::sqrt(d) : 1.0;
    }
    MatrixXcd As = scale_.asDiagonal() * A * scale_.asDiagonal();
    ldlt_.compute(As);
    const bool bad = ldlt_.info() != Eigen::Success || ldlt_.rcond() < 1e-12;
    if (bad) {
        const double reg = 1e-9 * A.real().trace() / double(n);
        A += reg * MatrixXcd::Identity(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double d = A(i, i).real();
            scale_(i) = d > 0.0 ? 1.0 / std::sqrt(d) : 1.0;
        }
        As = scale_.asDiagonal() * A * scale_.asDiagonal();
        ldlt_.compute(As);
        regularized_ = true;
        if (ldlt_.info() != Eigen::Success || !(ldlt_.rcond() > 0.0))
            throw std::runtime_error("HermitianSolver: singular matrix after regularization" +
                                     (context_.empty() ? "" : " (" + context_ + ")"));
    }
}

VectorXcd HermitianSolver::solve(const VectorXcd& b) const {
    if (zero_) return VectorXcd::Zero(b.size());
    VectorXcd x = scale_.asDiagonal() * ldlt_.solve(scale_.asDiagonal() * b);
    if (!x.allFinite())
        throw std::runtime_error("HermitianSolver: non-finite solution" +
                                 (context_.empty() ? "" : " (" + context_ + ")"));
    return x;
}

MatrixXcd HermitianSolver::solve(const MatrixXcd& B) const {
    if (zero_) return MatrixXcd::Zero(B.rows(), B.cols());
    MatrixXcd X = scale_.asDiagonal() * ldlt_.solve(scale_.asDiagonal() * B);
    if (!X.allFinite())
        throw std::runtime_error("HermitianSolver: non-finite solution" +
                                 (context_.empty() ? "" : " (" + context_ + ")"));
    return X;
}

void TrackedStats::init(int dim, int num_ues, const SimConfig& cfg) {
    Qhat = (double(cfg.tau_p) * cfg.sigma2) * MatrixXcd::Identity(dim, dim);
    Qhat_tk.assign(num_ues, cfg.sigma2 * MatrixXcd::Identity(dim, dim));
    hbar_hat.assign(num_ues, LosMean{});
    for (auto& m : hbar_hat) m.init(dim);
    blocks_seen = 0;
}

void TrackedStats::update_received(const MatrixXcd& Y, double eta) {
    if (mode == AveragingMode::exponential) {
        Qhat = exp_update(Qhat, Y * Y.adjoint(), eta);
    } else {
        const double n = double(blocks_seen + 1);
        Qhat = ((n - 1.0) * Qhat + Y * Y.adjoint()) / n;
        Qhat = 0.5 * (Qhat + Qhat.adjoint()).eval();
    }
}

void TrackedStats::update_despread(int k, const VectorXcd& y, double eta, const SimConfig& cfg) {
    hbar_hat[k].update(y, cfg);
    const VectorXcd centered =
        y - std::sqrt(cfg.p * double(cfg.tau_p)) * hbar_hat[k].mean(cfg.p, cfg.tau_p);
    if (mode == AveragingMode::exponential) {
        Qhat_tk[k] = exp_update(Qhat_tk[k], centered * centered.adjoint(), eta);
    } else {
        const double n = double(blocks_seen + 1);
        Qhat_tk[k] = ((n - 1.0) * Qhat_tk[k] + centered * centered.adjoint()) / n;
        Qhat_tk[k] = 0.5 * (Qhat_tk[k] + Qhat_tk[k].adjoint()).eval();
    }
}

void dump_matrix_binary(const std::string& path, const MatrixXcd& M) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("dump_matrix_binary: cannot open " + path);
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        for (Eigen::Index c = 0; c < M.cols(); ++c) {
            const double re = M(r, c).real();
            const double im = M(r, c).imag();
            out.write(reinterpret_cast<const char*>(&re), sizeof(double));
            out.write(reinterpret_cast<const char*>(&im), sizeof(double));
        }
    }
}

void dump_matrix_csv(const std::string& path, const MatrixXcd& M) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("dump_matrix_csv: cannot open " + path);
    out.precision(17);
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        for (Eigen::Index c = 0; c < M.cols(); ++c) {
            if (c) out << ',';
            out << M(r, c).real();
            const double im = M(r, c).imag();
            out << (im < 0 ? '-' : '+') << std::abs(im) << 'i';
        }
        out << '\n';
    }
}

MatrixXcd load_matrix_binary(const std::string& path, int rows, int cols) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_matrix_binary: cannot open " + path);
    MatrixXcd M(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            double re = 0.0, im = 0.0;
            in.read(reinterpret_cast<char*>(&re), sizeof(double));
            in.read(reinterpret_cast<char*>(&im), sizeof(double));
            M(r, c) = Complex(re, im);
        }
    }
    if (!in) throw std::runtime_error("load_matrix_binary: short read from " + path);
    return M;
}

}  // namespace macesim
