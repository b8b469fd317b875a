#include "macesim/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace macesim {

namespace {

constexpr double kMinDistanceM = 5.0;  // horizontal AP-UE distance floor
constexpr double kApHeightM = 10.0;
constexpr double kAzimuthSpreadRad = 15.0 * M_PI / 180.0;

// Gaussian local-scattering correlation on a half-wavelength ULA:
// [R]_{m,n} = exp(i*pi*(m-n)*sin(theta)) * exp(-(pi*(m-n)*spread*cos(theta))^2 / 2).
// This is the covariance of a steering vector with a linearized Gaussian
// angle perturbation, hence PSD by construction.
MatrixXcd scattering_correlation(int N, double theta, double spread) {
    MatrixXcd R(N, N);
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    for (int m = 0; m < N; ++m) {
        for (int n = 0; n < N; ++n) {
            const double d = M_PI * (m - n);
            const double damp = d * spread * c;
            R(m, n) = std::exp(-0.5 * damp * damp) *
                      Complex(std::cos(d * s), std::sin(d * s));
        }
    }
    return R;
}

MatrixXcd psd_factor(const MatrixXcd& R) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(R);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("build_stats: eigendecomposition of Rbreve failed");
    const double scale = std::max(1.0, std::abs(eig.eigenvalues().maxCoeff()));
    if (eig.eigenvalues().minCoeff() < -1e-10 * scale)
        throw std::runtime_error("build_stats: Rbreve is not PSD");
    Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * lam.asDiagonal();
}

}  // namespace

Positions place_network(const SimConfig& cfg, RngStream& rng) {
    cfg.validate();
    Positions pos;
    pos.aps.reserve(cfg.L);
    pos.ues.reserve(cfg.K);
    for (int j = 0; j < cfg.L; ++j) {
        const double x = rng.uniform() * cfg.area_m;
        const double y = rng.uniform() * cfg.area_m;
        pos.aps.emplace_back(x, y);
    }
    for (int k = 0; k < cfg.K; ++k) {
        const double x = rng.uniform() * cfg.area_m;
        const double y = rng.uniform() * cfg.area_m;
        pos.ues.emplace_back(x, y);
    }
    return pos;
}

NetworkStats build_stats(const Positions& positions, const SimConfig& cfg, RngStream& rng) {
    cfg.validate();
    if (int(positions.aps.size()) != cfg.L || int(positions.ues.size()) != cfg.K)
        throw std::invalid_argument("build_stats: positions do not match config");

    const int N = cfg.N;
    NetworkStats stats(positions, cfg.L, cfg.K, N);

    for (int j = 0; j < cfg.L; ++j) {
        for (int k = 0; k < cfg.K; ++k) {
            const Eigen::Vector2d delta = positions.ues[k] - positions.aps[j];
            const double d2d = std::max(delta.norm(), kMinDistanceM);
            const double d3d = std::sqrt(d2d * d2d + kApHeightM * kApHeightM);
            const double beta_db = -30.5 - 36.7 * std::log10(d3d);
            const double beta = std::pow(10.0, beta_db / 10.0);
            const double kappa = std::pow(10.0, cfg.rician_offset - cfg.rician_slope * d2d);
            const double theta = std::atan2(delta.y(), delta.x());

            double los_power = beta * kappa / (kappa + 1.0);
            double nlos_power = beta / (kappa + 1.0);
            if (cfg.channel_mode == ChannelMode::pure_los) {
                los_power = beta;
                nlos_power = 0.0;
            } else if (cfg.channel_mode == ChannelMode::pure_nlos) {
                los_power = 0.0;
                nlos_power = beta;
            }

            const double phase = 2.0 * M_PI * rng.uniform();

            LinkStats& link = stats.link(j, k);
            link.beta = beta;
            link.hbar.resize(N);
            const double amp = std::sqrt(los_power);
            for (int n = 0; n < N; ++n) {
                const double arg = M_PI * n * std::sin(theta) + phase;
                link.hbar(n) = amp * Complex(std::cos(arg), std::sin(arg));
            }
            if (nlos_power > 0.0) {
                link.rbreve = nlos_power * scattering_correlation(N, theta, kAzimuthSpreadRad);
                link.nlos_factor = psd_factor(link.rbreve);
            } else {
                link.rbreve = MatrixXcd::Zero(N, N);
                link.nlos_factor = MatrixXcd::Zero(N, N);
            }
        }
    }
    return stats;
}

CollectiveStats collective(const NetworkStats& stats, int k) {
    const int L = stats.num_aps();
    const int N = stats.antennas();
    CollectiveStats out;
    out.hbar.resize(size_t(L) * N);
    out.rbreve = MatrixXcd::Zero(size_t(L) * N, size_t(L) * N);
    for (int j = 0; j < L; ++j) {
        const auto& link = stats.link(j, k);
        out.hbar.segment(size_t(j) * N, N) = link.hbar;
        out.rbreve.block(size_t(j) * N, size_t(j) * N, N, N) = link.rbreve;
    }
    out.r = out.hbar * out.hbar.adjoint() + out.rbreve;
    return out;
}

ChannelRealization sample_channels(const NetworkStats& stats, RngStream& rng) {
    const int L = stats.num_aps();
    const int K = stats.num_ues();
    const int N = stats.antennas();
    ChannelRealization real;
    real.L = L;
    real.K = K;
    real.N = N;
    real.h.resize(size_t(L) * K);
    VectorXcd w(N);
    for (int j = 0; j < L; ++j) {
        for (int k = 0; k < K; ++k) {
            for (int n = 0; n < N; ++n) w(n) = rng.complex_normal();
            const auto& link = stats.link(j, k);
            real.h[size_t(j) * K + k] = link.hbar + link.nlos_factor * w;
        }
    }
    return real;
}

int assign_master(const NetworkStats& stats, int k) {
    int best = 0;
    double best_beta = stats.link(0, k).beta;
    for (int j = 1; j < stats.num_aps(); ++j) {
        const double b = stats.link(j, k).beta;
        if (b > best_beta) {
            best = j;
            best_beta = b;
        }
    }
    return best;
}

}  // namespace macesim
