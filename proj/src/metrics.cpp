#include "macesim/metrics.hpp"

#include <stdexcept>

namespace macesim {

const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::local: return "local";
        case Scheme::central: return "central";
        case Scheme::mace: return "mace";
    }
    throw std::invalid_argument("to_string: unknown scheme");
}

Scheme scheme_from_string(const std::string& name) {
    if (name == "local") return Scheme::local;
    if (name == "central") return Scheme::central;
    if (name == "mace") return Scheme::mace;
    throw std::invalid_argument("scheme_from_string: unknown scheme '" + name + "'");
}

void accumulate(NmseAccumulator& acc, const Eigen::VectorXcd& h_true,
                const Eigen::VectorXcd& h_est) {
    if (h_true.size() != h_est.size())
        throw std::invalid_argument("accumulate: dimension mismatch");
    acc.sum_sq_err += (h_true - h_est).squaredNorm();
    ++acc.count;
}

long fronthaul(Scheme scheme, int L, int N, int tau_p) {
    switch (scheme) {
        case Scheme::local: return 0;
        case Scheme::central: return long(tau_p) * L * N;
        case Scheme::mace: return long(tau_p) * (N + L - 1);
    }
    throw std::invalid_argument("fronthaul: unknown scheme");
}

int inversion_dim(Scheme scheme, int L, int N) {
    switch (scheme) {
        case Scheme::local: return N;
        case Scheme::central: return L * N;
        case Scheme::mace: return N + L - 1;
    }
    throw std::invalid_argument("inversion_dim: unknown scheme");
}

ResourceReport resource_report(Scheme scheme, int L, int N, int tau_p) {
    return {fronthaul(scheme, L, N, tau_p), inversion_dim(scheme, L, N)};
}

}  // namespace macesim
