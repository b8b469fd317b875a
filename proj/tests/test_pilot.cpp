#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "macesim/pilot.hpp"
#include "macesim/tracker.hpp"
#include "test_util.hpp"

using namespace macesim;
using namespace macesim::test;

namespace {

SimConfig tiny_cfg(int L, int N, int K, int tau_p, double sigma2) {
    SimConfig cfg;
    cfg.L = L;
    cfg.N = N;
    cfg.K = K;
    cfg.tau_p = tau_p;
    cfg.sigma2 = sigma2;
    cfg.p = 0.25;
    return cfg;
}

NetworkStats random_stats(int L, int K, int N, std::uint64_t seed) {
    return make_synthetic(L, K, N, [&](NetworkStats& s) {
        RngStream rng(seed);
        for (int j = 0; j < L; ++j)
            for (int k = 0; k < K; ++k)
                set_link(s, j, k, random_vector(N, rng), random_psd(N, rng));
    });
}

PilotBlock make_block(const NetworkStats& stats, const SimConfig& cfg, const PilotBook& book,
                      std::uint64_t seed) {
    RngStream root(seed);
    RngStream asg = root.derive(rng_tag::kTagAssignment);
    RngStream chan = root.derive(rng_tag::kTagChannels);
    RngStream noise = root.derive(rng_tag::kTagNoise);
    const PilotAssignment a = draw_assignment(cfg.K, cfg.tau_p, asg);
    const ChannelRealization ch = sample_channels(stats, chan);
    return synthesize_received(ch, a, book, cfg, noise);
}

}  // namespace

TEST_CASE("pilot book orthogonality") {
    for (int tau : {2, 8}) {
        const PilotBook book = make_pilot_book(tau);
        const MatrixXcd gram = book.phi * book.phi.adjoint();
        CHECK((gram - double(tau) * MatrixXcd::Identity(tau, tau)).cwiseAbs().maxCoeff() <
              1e-12);
        for (int t = 0; t < tau; ++t)
            CHECK(book.pilot(t).squaredNorm() == doctest::Approx(tau).epsilon(1e-12));
    }
    CHECK_THROWS_AS(make_pilot_book(1), std::invalid_argument);
}

TEST_CASE("assignment marginals match the uniform and sign laws") {
    const int blocks = 100000;
    const int tau = 5;
    RngStream rng(31);
    long hits = 0, gamma_sum = 0;
    for (int b = 0; b < blocks; ++b) {
        const PilotAssignment a = draw_assignment(1, tau, rng);
        if (a.t[0] == 0) ++hits;
        gamma_sum += a.gamma[0];
    }
    const double p_hat = double(hits) / blocks;
    const double se_p = std::sqrt(0.2 * 0.8 / blocks);
    CHECK(std::abs(p_hat - 0.2) < 3 * se_p);
    const double mean_gamma = double(gamma_sum) / blocks;
    CHECK(std::abs(mean_gamma) < 3.0 / std::sqrt(double(blocks)));
}

TEST_CASE("single pilot degenerates to index 0") {
    RngStream rng(5);
    const PilotAssignment a = draw_assignment(6, 1, rng);
    for (int t : a.t) CHECK(t == 0);
}

TEST_CASE("synthesized block reconstructs bit-exactly from its parts") {
    const SimConfig cfg = tiny_cfg(2, 3, 3, 4, 0.01);
    const NetworkStats stats = random_stats(2, 3, 3, 8);
    const PilotBook book = make_pilot_book(cfg.tau_p);
    const PilotBlock block = make_block(stats, cfg, book, 17);
    for (int j = 0; j < cfg.L; ++j) {
        MatrixXcd expect = MatrixXcd::Zero(cfg.N, cfg.tau_p);
        for (int i = 0; i < cfg.K; ++i) {
            const Complex scale = std::sqrt(cfg.p) * double(block.assignment.gamma[i]);
            expect += scale * block.channels.at(j, i) * book.pilot(block.assignment.t[i]);
        }
        expect += block.noise[j];
        CHECK(expect == block.Y[j]);
    }
}

TEST_CASE("noiseless single-UE block is rank one") {
    const SimConfig cfg = tiny_cfg(1, 3, 1, 4, 0.0);
    const NetworkStats stats = random_stats(1, 1, 3, 9);
    const PilotBook book = make_pilot_book(cfg.tau_p);
    const PilotBlock block = make_block(stats, cfg, book, 3);
    const MatrixXcd& Y = block.Y[0];
    const MatrixXcd expect = std::sqrt(cfg.p) * double(block.assignment.gamma[0]) *
                             block.channels.at(0, 0) * book.pilot(block.assignment.t[0]);
    CHECK(rel_frobenius(Y, expect) < 1e-14);
    Eigen::JacobiSVD<MatrixXcd> svd(Y);
    CHECK(svd.singularValues()(1) < 1e-12 * svd.singularValues()(0));
}

TEST_CASE("received sample covariance matches the closed form") {
    const SimConfig cfg = tiny_cfg(1, 2, 2, 3, 0.05);
    const NetworkStats stats = random_stats(1, 2, 2, 12);
    const PilotBook book = make_pilot_book(cfg.tau_p);
    const MatrixXcd q_true = true_q_local(stats, cfg, 0);
    MatrixXcd acc = MatrixXcd::Zero(cfg.N, cfg.N);
    const int blocks = 10000;
    for (int b = 0; b < blocks; ++b) {
        const PilotBlock block = make_block(stats, cfg, book, 1000 + b);
        acc += block.Y[0] * block.Y[0].adjoint();
    }
    acc /= double(blocks);
    CHECK(rel_frobenius(acc, q_true) < 0.05);
}

TEST_CASE("despreading expansions") {
    const PilotBook book = make_pilot_book(4);
    SimConfig cfg = tiny_cfg(1, 3, 1, 4, 0.0);
    const NetworkStats stats = random_stats(1, 1, 3, 21);

    SUBCASE("single UE, no noise") {
        const PilotBlock block = make_block(stats, cfg, book, 2);
        const DespreadSignal y = despread_local(block.Y[0], 0, block.assignment, book);
        const VectorXcd expect =
            std::sqrt(cfg.p * cfg.tau_p) * block.channels.at(0, 0);
        CHECK((y.y - expect).norm() < 1e-12 * expect.norm());
    }

    SUBCASE("two UEs, same pilot, equal signs") {
        SimConfig cfg2 = tiny_cfg(1, 3, 2, 4, 0.0);
        const NetworkStats stats2 = random_stats(1, 2, 3, 22);
        RngStream chan(13);
        const ChannelRealization ch = sample_channels(stats2, chan);
        PilotAssignment a;
        a.t = {1, 1};
        a.gamma = {1, 1};
        RngStream noise(14);
        const PilotBlock block = synthesize_received(ch, a, book, cfg2, noise);
        const DespreadSignal y = despread_local(block.Y[0], 0, a, book);
        const VectorXcd expect =
            std::sqrt(cfg2.p * cfg2.tau_p) * (ch.at(0, 0) + ch.at(0, 1));
        CHECK((y.y - expect).norm() < 1e-10 * expect.norm());
    }

    SUBCASE("two UEs on orthogonal pilots") {
        SimConfig cfg2 = tiny_cfg(1, 3, 2, 4, 0.0);
        const NetworkStats stats2 = random_stats(1, 2, 3, 23);
        RngStream chan(15);
        const ChannelRealization ch = sample_channels(stats2, chan);
        PilotAssignment a;
        a.t = {0, 2};
        a.gamma = {1, -1};
        RngStream noise(16);
        const PilotBlock block = synthesize_received(ch, a, book, cfg2, noise);
        const DespreadSignal y = despread_local(block.Y[0], 0, a, book);
        const VectorXcd expect = std::sqrt(cfg2.p * cfg2.tau_p) * ch.at(0, 0);
        CHECK((y.y - expect).norm() < 1e-12 * expect.norm());
    }
}

TEST_CASE("despreading is linear") {
    const PilotBook book = make_pilot_book(3);
    PilotAssignment a;
    a.t = {1};
    a.gamma = {-1};
    RngStream rng(9);
    MatrixXcd A(2, 3), B(2, 3);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 3; ++c) {
            A(r, c) = rng.complex_normal();
            B(r, c) = rng.complex_normal();
        }
    const VectorXcd lhs = despread_local(A + B, 0, a, book).y;
    const VectorXcd rhs = despread_local(A, 0, a, book).y + despread_local(B, 0, a, book).y;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("despread signal matches the delta-expansion identity") {
    const SimConfig cfg = tiny_cfg(2, 2, 4, 3, 0.02);
    const NetworkStats stats = random_stats(2, 4, 2, 33);
    const PilotBook book = make_pilot_book(cfg.tau_p);
    for (int trial = 0; trial < 50; ++trial) {
        const PilotBlock block = make_block(stats, cfg, book, 500 + trial);
        const int k = trial % cfg.K;
        for (int j = 0; j < cfg.L; ++j) {
            const DespreadSignal y = despread_local(block.Y[j], k, block.assignment, book);
            VectorXcd expect =
                std::sqrt(cfg.p * cfg.tau_p) * block.channels.at(j, k);
            for (int i = 0; i < cfg.K; ++i) {
                if (i == k) continue;
                const int delta = delta_oracle(block.assignment, i, k);
                if (delta != 0)
                    expect += std::sqrt(cfg.p * cfg.tau_p) * double(delta) *
                              block.channels.at(j, i);
            }
            const VectorXcd correlator =
                (double(block.assignment.gamma[k]) / std::sqrt(double(cfg.tau_p))) *
                book.pilot(block.assignment.t[k]).conjugate().transpose();
            expect += block.noise[j] * correlator;
            CHECK((y.y - expect).norm() < 1e-10 * (1.0 + expect.norm()));
        }
    }
}

TEST_CASE("delta distribution over many blocks") {
    const int blocks = 100000;
    const int tau = 5;
    RngStream rng(77);
    long n0 = 0, np = 0, nm = 0;
    double sq_sum = 0.0;
    for (int b = 0; b < blocks; ++b) {
        const PilotAssignment a = draw_assignment(2, tau, rng);
        const int d = delta_oracle(a, 1, 0);
        if (d == 0) ++n0;
        else if (d == 1) ++np;
        else ++nm;
        sq_sum += double(d) * d;
    }
    auto check_freq = [&](long count, double p) {
        const double se = std::sqrt(p * (1 - p) / blocks);
        CHECK(std::abs(double(count) / blocks - p) < 3 * se);
    };
    check_freq(n0, 1.0 - 1.0 / tau);
    check_freq(np, 0.5 / tau);
    check_freq(nm, 0.5 / tau);
    // E[delta^2] = 1/tau_p
    const double var = 1.0 / tau * (1.0 - 1.0 / tau);
    CHECK(std::abs(sq_sum / blocks - 1.0 / tau) < 3 * std::sqrt(var / blocks));
}

TEST_CASE("delta_oracle cases and misuse") {
    PilotAssignment a;
    a.t = {0, 0, 2};
    a.gamma = {1, -1, 1};
    CHECK(delta_oracle(a, 2, 0) == 0);
    CHECK(delta_oracle(a, 1, 0) == -1);
    a.gamma = {1, 1, 1};
    CHECK(delta_oracle(a, 1, 0) == 1);
    CHECK_THROWS_AS(delta_oracle(a, 1, 1), std::invalid_argument);
}

TEST_CASE("central despreading stacks the local despreads bit-exactly") {
    const SimConfig cfg = tiny_cfg(3, 2, 2, 4, 0.1);
    const NetworkStats stats = random_stats(3, 2, 2, 44);
    const PilotBook book = make_pilot_book(cfg.tau_p);
    const PilotBlock block = make_block(stats, cfg, book, 91);
    const DespreadSignal y = despread_central(block, 1, book);
    REQUIRE(y.y.size() == cfg.L * cfg.N);
    for (int j = 0; j < cfg.L; ++j) {
        const VectorXcd local = despread_local(block.Y[j], 1, block.assignment, book).y;
        CHECK(y.y.segment(j * cfg.N, cfg.N) == local);
    }
}

TEST_CASE("despread noise covariance is sigma^2 I when channels are zero") {
    const int N = 3, tau = 4;
    SimConfig cfg = tiny_cfg(1, N, 1, tau, 0.2);
    NetworkStats stats = make_synthetic(1, 1, N, [&](NetworkStats& s) {
        set_link(s, 0, 0, VectorXcd::Zero(N), MatrixXcd::Zero(N, N));
    });
    cfg.p = 0.0;  // kill the pilot term entirely
    const PilotBook book = make_pilot_book(tau);
    MatrixXcd acc = MatrixXcd::Zero(N, N);
    const int blocks = 10000;
    for (int b = 0; b < blocks; ++b) {
        const PilotBlock block = make_block(stats, cfg, book, 7000 + b);
        const VectorXcd y = despread_local(block.Y[0], 0, block.assignment, book).y;
        acc += y * y.adjoint();
    }
    acc /= double(blocks);
    CHECK(rel_frobenius(acc, cfg.sigma2 * MatrixXcd::Identity(N, N)) < 0.05);
}

TEST_CASE("synthesize with zero UEs equivalent: zero power and zero noise") {
    SimConfig cfg = tiny_cfg(1, 2, 1, 3, 0.0);
    cfg.p = 0.0;
    const NetworkStats stats = random_stats(1, 1, 2, 50);
    const PilotBook book = make_pilot_book(cfg.tau_p);
    const PilotBlock block = make_block(stats, cfg, book, 3);
    CHECK(block.Y[0].norm() == 0.0);

    // literal empty network
    SimConfig none_cfg = tiny_cfg(1, 2, 1, 3, 0.0);
    none_cfg.K = 0;
    const NetworkStats none = make_synthetic(1, 0, 2, [](NetworkStats&) {});
    RngStream asg(1), chan(2), noise(3);
    const PilotAssignment a = draw_assignment(0, none_cfg.tau_p, asg);
    const ChannelRealization ch = sample_channels(none, chan);
    const PilotBlock empty = synthesize_received(ch, a, book, none_cfg, noise);
    CHECK(empty.Y[0].norm() == 0.0);
}
