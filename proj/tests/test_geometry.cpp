#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "macesim/geometry.hpp"
#include "test_util.hpp"

using namespace macesim;
using namespace macesim::test;

namespace {

SimConfig small_cfg() {
    SimConfig cfg;
    cfg.L = 3;
    cfg.N = 4;
    cfg.K = 4;
    cfg.tau_p = 5;
    return cfg;
}

}  // namespace

TEST_CASE("place_network stays in the square and is seed-reproducible") {
    SimConfig cfg = small_cfg();
    cfg.area_m = 1000.0;
    RngStream rng1(3), rng2(3);
    const Positions a = place_network(cfg, rng1);
    const Positions b = place_network(cfg, rng2);
    REQUIRE(a.aps.size() == size_t(cfg.L));
    REQUIRE(a.ues.size() == size_t(cfg.K));
    for (const auto& p : a.aps) {
        CHECK(p.x() >= 0.0);
        CHECK(p.x() <= 1000.0);
        CHECK(p.y() >= 0.0);
        CHECK(p.y() <= 1000.0);
    }
    for (size_t i = 0; i < a.ues.size(); ++i) CHECK(a.ues[i] == b.ues[i]);
    for (size_t i = 0; i < a.aps.size(); ++i) CHECK(a.aps[i] == b.aps[i]);
}

TEST_CASE("place_network degenerate square puts everything at the origin") {
    SimConfig cfg = small_cfg();
    cfg.area_m = 0.0;
    RngStream rng(1);
    const Positions pos = place_network(cfg, rng);
    for (const auto& p : pos.aps) CHECK(p.norm() == 0.0);
    for (const auto& p : pos.ues) CHECK(p.norm() == 0.0);
}

TEST_CASE("build_stats scaling identity and PSD structure") {
    SimConfig cfg = small_cfg();
    const NetworkStats stats = random_network(cfg, 77);
    for (int j = 0; j < cfg.L; ++j) {
        for (int k = 0; k < cfg.K; ++k) {
            const auto& link = stats.link(j, k);
            // N beta = |hbar|^2 + tr(Rbreve)
            const double lhs = double(cfg.N) * link.beta;
            const double rhs = link.hbar.squaredNorm() + link.rbreve.real().trace();
            CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(rhs));
            // Hermitian within 1e-12, eigenvalues above the PSD floor
            CHECK((link.rbreve - link.rbreve.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
            Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(link.rbreve);
            CHECK(eig.eigenvalues().minCoeff() >
                  -1e-10 * link.rbreve.real().trace() / cfg.N);
            // factor reproduces Rbreve
            CHECK(rel_frobenius(link.nlos_factor * link.nlos_factor.adjoint(), link.rbreve) <
                  1e-10);
        }
    }
}

TEST_CASE("build_stats is bit-reproducible for a fixed seed") {
    SimConfig cfg = small_cfg();
    const NetworkStats a = random_network(cfg, 5);
    const NetworkStats b = random_network(cfg, 5);
    for (int j = 0; j < cfg.L; ++j)
        for (int k = 0; k < cfg.K; ++k) {
            CHECK(a.link(j, k).hbar == b.link(j, k).hbar);
            CHECK(a.link(j, k).rbreve == b.link(j, k).rbreve);
        }
}

TEST_CASE("pure LoS and pure NLoS limits") {
    SimConfig cfg = small_cfg();
    cfg.channel_mode = ChannelMode::pure_los;
    const NetworkStats los = random_network(cfg, 11);
    for (int j = 0; j < cfg.L; ++j)
        for (int k = 0; k < cfg.K; ++k) {
            CHECK(los.link(j, k).rbreve.norm() == 0.0);
            CHECK(los.link(j, k).hbar.squaredNorm() ==
                  doctest::Approx(cfg.N * los.link(j, k).beta).epsilon(1e-12));
        }

    cfg.channel_mode = ChannelMode::pure_nlos;
    const NetworkStats nlos = random_network(cfg, 11);
    for (int j = 0; j < cfg.L; ++j)
        for (int k = 0; k < cfg.K; ++k) {
            CHECK(nlos.link(j, k).hbar.norm() == 0.0);
            CHECK(nlos.link(j, k).rbreve.real().trace() ==
                  doctest::Approx(cfg.N * nlos.link(j, k).beta).epsilon(1e-12));
        }
}

TEST_CASE("collective stacking, block structure, trace additivity") {
    SimConfig cfg = small_cfg();
    const NetworkStats stats = random_network(cfg, 23);
    const int N = cfg.N;
    for (int k = 0; k < cfg.K; ++k) {
        const CollectiveStats coll = collective(stats, k);
        double tr_sum = 0.0;
        for (int j = 0; j < cfg.L; ++j) {
            CHECK(coll.hbar.segment(j * N, N) == stats.link(j, k).hbar);
            CHECK(coll.rbreve.block(j * N, j * N, N, N) == stats.link(j, k).rbreve);
            tr_sum += stats.correlation(j, k).real().trace();
            for (int j2 = 0; j2 < cfg.L; ++j2) {
                if (j2 == j) continue;
                CHECK(coll.rbreve.block(j * N, j2 * N, N, N).norm() == 0.0);
            }
        }
        CHECK(coll.r.real().trace() == doctest::Approx(tr_sum).epsilon(1e-12));
        CHECK(rel_frobenius(coll.r, coll.hbar * coll.hbar.adjoint() + coll.rbreve) < 1e-12);
    }
}

TEST_CASE("collective of a single-AP network equals the per-AP stats") {
    SimConfig cfg = small_cfg();
    cfg.L = 1;
    const NetworkStats stats = random_network(cfg, 31);
    const CollectiveStats coll = collective(stats, 2);
    CHECK(coll.hbar == stats.link(0, 2).hbar);
    CHECK(coll.rbreve == stats.link(0, 2).rbreve);
}

TEST_CASE("sample_channels: zero NLoS covariance gives the deterministic mean") {
    NetworkStats stats = make_synthetic(2, 2, 3, [](NetworkStats& s) {
        RngStream rng(4);
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                set_link(s, j, k, random_vector(3, rng), MatrixXcd::Zero(3, 3));
    });
    RngStream rng(8);
    const ChannelRealization real = sample_channels(stats, rng);
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) CHECK(real.at(j, k) == stats.link(j, k).hbar);
}

TEST_CASE("sample_channels: identity covariance second-moment oracle") {
    // Rbreve = I, hbar = 0: ||h||^2/N averages to 1 (sum of Exp(1) draws).
    const int N = 4;
    NetworkStats stats = make_synthetic(1, 1, N, [&](NetworkStats& s) {
        set_link(s, 0, 0, VectorXcd::Zero(N), MatrixXcd::Identity(N, N));
    });
    RngStream rng(19);
    const int draws = 100000;
    double acc = 0.0;
    for (int i = 0; i < draws; ++i) acc += sample_channels(stats, rng).at(0, 0).squaredNorm();
    const double mean = acc / draws / N;
    const double se = 1.0 / std::sqrt(double(draws) * N);  // Var(|z|^2) = 1 per entry
    CHECK(std::abs(mean - 1.0) < 3 * se);
}

TEST_CASE("sample_channels: empirical covariance converges to Rbreve") {
    const int N = 3;
    RngStream seed_rng(4242);
    const MatrixXcd rb = random_psd(N, seed_rng);
    NetworkStats stats = make_synthetic(1, 1, N, [&](NetworkStats& s) {
        set_link(s, 0, 0, VectorXcd::Zero(N), rb);
    });
    RngStream rng(77);
    const int draws = 100000;
    MatrixXcd acc = MatrixXcd::Zero(N, N);
    for (int i = 0; i < draws; ++i) {
        const VectorXcd h = sample_channels(stats, rng).at(0, 0);
        acc += h * h.adjoint();
    }
    acc /= double(draws);
    // loose statistical bound: 5/sqrt(draws) * ||Rb||_F * N
    CHECK((acc - rb).norm() < 5.0 / std::sqrt(double(draws)) * rb.norm() * N);
    // entrywise within 5 standard errors (entry variance ~ Rb_ii Rb_jj / draws)
    for (int r = 0; r < N; ++r)
        for (int c = 0; c < N; ++c) {
            const double se =
                std::sqrt(rb(r, r).real() * rb(c, c).real() / double(draws));
            CHECK(std::abs((acc - rb)(r, c)) < 5 * se);
        }
}

TEST_CASE("assign_master picks the largest beta with smallest-index ties") {
    NetworkStats stats = make_synthetic(3, 1, 2, [](NetworkStats& s) {
        const VectorXcd h = VectorXcd::Zero(2);
        set_link(s, 0, 0, h, 0.1 * MatrixXcd::Identity(2, 2));
        set_link(s, 1, 0, h, 0.5 * MatrixXcd::Identity(2, 2));
        set_link(s, 2, 0, h, 0.3 * MatrixXcd::Identity(2, 2));
    });
    CHECK(assign_master(stats, 0) == 1);

    NetworkStats tie = make_synthetic(2, 1, 2, [](NetworkStats& s) {
        const VectorXcd h = VectorXcd::Zero(2);
        set_link(s, 0, 0, h, 0.4 * MatrixXcd::Identity(2, 2));
        set_link(s, 1, 0, h, 0.4 * MatrixXcd::Identity(2, 2));
    });
    CHECK(assign_master(tie, 0) == 0);
}

TEST_CASE("stored beta matches tr(R)/N recomputed from the stats") {
    SimConfig cfg = small_cfg();
    const NetworkStats stats = random_network(cfg, 99);
    for (int j = 0; j < cfg.L; ++j)
        for (int k = 0; k < cfg.K; ++k) {
            const double recomputed = stats.correlation(j, k).real().trace() / cfg.N;
            CHECK(std::abs(recomputed - stats.link(j, k).beta) <=
                  1e-10 * stats.link(j, k).beta);
        }
}
