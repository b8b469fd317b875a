#include "macesim/pilot.hpp"

#include <cmath>
#include <stdexcept>

namespace macesim {

PilotBook make_pilot_book(int tau_p) {
    if (tau_p < 2) throw std::invalid_argument("make_pilot_book: tau_p must be >= 2");
    PilotBook book;
    book.phi.resize(tau_p, tau_p);
    for (int t = 0; t < tau_p; ++t) {
        for (int s = 0; s < tau_p; ++s) {
            const double arg = -2.0 * M_PI * double(t) * double(s) / double(tau_p);
            book.phi(t, s) = Complex(std::cos(arg), std::sin(arg));
        }
    }
    return book;
}

PilotAssignment draw_assignment(int K, int tau_p, RngStream& rng) {
    PilotAssignment a;
    a.t.resize(K);
    a.gamma.resize(K);
    for (int k = 0; k < K; ++k) a.t[k] = rng.index(tau_p);
    for (int k = 0; k < K; ++k) a.gamma[k] = rng.sign();
    return a;
}

PilotBlock synthesize_received(const ChannelRealization& channels,
                               const PilotAssignment& assignment, const PilotBook& book,
                               const SimConfig& cfg, RngStream& rng) {
    const int L = channels.L;
    const int K = channels.K;
    const int N = channels.N;
    if (int(assignment.t.size()) != K || book.tau_p() != cfg.tau_p)
        throw std::invalid_argument("synthesize_received: mismatched inputs");

    PilotBlock block;
    block.assignment = assignment;
    block.channels = channels;
    block.noise.resize(L);
    block.Y.resize(L);

    const double sqrt_p = std::sqrt(cfg.p);
    const double noise_amp = std::sqrt(cfg.sigma2);
    for (int j = 0; j < L; ++j) {
        MatrixXcd& noise = block.noise[j];
        noise.resize(N, cfg.tau_p);
        for (int s = 0; s < cfg.tau_p; ++s)
            for (int n = 0; n < N; ++n) noise(n, s) = noise_amp * rng.complex_normal();

        MatrixXcd Y = MatrixXcd::Zero(N, cfg.tau_p);
        for (int i = 0; i < K; ++i) {
            const Complex scale = sqrt_p * double(assignment.gamma[i]);
            Y += scale * channels.at(j, i) * book.pilot(assignment.t[i]);
        }
        Y += noise;
        block.Y[j] = std::move(Y);
    }
    return block;
}

DespreadSignal despread_local(const MatrixXcd& Y_j, int k, const PilotAssignment& assignment,
                              const PilotBook& book) {
    const int tau_p = book.tau_p();
    if (Y_j.cols() != tau_p) throw std::invalid_argument("despread_local: Y has wrong width");
    const VectorXcd correlator =
        (double(assignment.gamma[k]) / std::sqrt(double(tau_p))) *
        book.pilot(assignment.t[k]).conjugate().transpose();
    DespreadSignal out;
    out.ue = k;
    out.y = Y_j * correlator;
    return out;
}

DespreadSignal despread_central(const PilotBlock& block, int k, const PilotBook& book) {
    const int L = int(block.Y.size());
    const int N = block.channels.N;
    DespreadSignal out;
    out.ue = k;
    out.y.resize(size_t(L) * N);
    for (int j = 0; j < L; ++j)
        out.y.segment(size_t(j) * N, N) = despread_local(block.Y[j], k, block.assignment, book).y;
    return out;
}

int delta_oracle(const PilotAssignment& assignment, int i, int k) {
    if (i == k) throw std::invalid_argument("delta_oracle: i must differ from k");
    if (assignment.t[i] != assignment.t[k]) return 0;
    return assignment.gamma[i] * assignment.gamma[k];
}

}  // namespace macesim
