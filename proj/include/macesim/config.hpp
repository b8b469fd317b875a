#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace macesim {

// Rician-factor handling for test fixtures: the regular distance-based
// factor, a pure-LoS limit (kappa -> inf) or a pure-NLoS limit (kappa = 0).
enum class ChannelMode { rician, pure_los, pure_nlos };

// LoS mean tracking: keep the running mean over all blocks seen, or freeze
// it once B blocks have been averaged.
enum class LosMode { running, frozen };

struct SimConfig {
    int L = 3;               // access points
    int N = 5;               // antennas per AP
    int K = 5;               // single-antenna UEs
    int tau_p = 5;           // pilot length (= coherence block length)
    double p = 0.1;          // per-UE transmit power [W]
    double sigma2 = 6.30957344480193e-13;  // noise variance [W], -92 dBm
    double eta = 0.95;       // forgetting factor of the exponential averaging
    int B = 100;             // LoS-averaging block count (frozen mode)
    double area_m = 1000.0;  // square side length [m]
    std::uint64_t seed = 1;
    int blocks = 300;        // accumulated Monte Carlo blocks
    int warmup = 20;         // tracker burn-in blocks, excluded from NMSE

    // Distance-based Rician factor, kappa = 10^(rician_offset - rician_slope * d_2D).
    double rician_offset = 1.3;
    double rician_slope = 0.003;

    ChannelMode channel_mode = ChannelMode::rician;
    LosMode los_mode = LosMode::running;
    bool normalize_fusion = false;  // scale fusion vectors to unit norm

    void validate() const {
        if (L < 1) throw std::invalid_argument("SimConfig: L must be >= 1");
        if (N < 1) throw std::invalid_argument("SimConfig: N must be >= 1");
        if (K < 1) throw std::invalid_argument("SimConfig: K must be >= 1");
        if (tau_p < 2) throw std::invalid_argument("SimConfig: tau_p must be >= 2");
        if (!(p >= 0.0)) throw std::invalid_argument("SimConfig: p must be >= 0");
        if (!(sigma2 >= 0.0)) throw std::invalid_argument("SimConfig: sigma2 must be >= 0");
        if (!(eta > 0.0 && eta < 1.0))
            throw std::invalid_argument("SimConfig: eta must be in (0,1)");
        if (B < 1) throw std::invalid_argument("SimConfig: B must be >= 1");
        if (!(area_m >= 0.0)) throw std::invalid_argument("SimConfig: area_m must be >= 0");
        if (blocks < 1) throw std::invalid_argument("SimConfig: blocks must be >= 1");
        if (warmup < 0) throw std::invalid_argument("SimConfig: warmup must be >= 0");
    }
};

}  // namespace macesim
