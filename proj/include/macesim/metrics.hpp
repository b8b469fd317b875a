#pragma once

#include <Eigen/Dense>
#include <string>

namespace macesim {

enum class Scheme { local, central, mace };

const char* to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

// Squared-error accumulator normalized by tr(R_{l,k}).
struct NmseAccumulator {
    Scheme scheme = Scheme::local;
    double sum_sq_err = 0.0;
    double norm = 1.0;  // tr(R) of the target pair
    long count = 0;

    [[nodiscard]] double nmse() const {
        return count > 0 ? sum_sq_err / (double(count) * norm) : 0.0;
    }
};

void accumulate(NmseAccumulator& acc, const Eigen::VectorXcd& h_true,
                const Eigen::VectorXcd& h_est);

// Complex scalars exchanged over fronthaul per coherence block:
// local 0, central tau_p*L*N, mace tau_p*(N+L-1).
long fronthaul(Scheme scheme, int L, int N, int tau_p);

// Side of the matrix solved per estimate: N, L*N, or N+L-1.
int inversion_dim(Scheme scheme, int L, int N);

struct ResourceReport {
    long fronthaul_scalars = 0;
    int inversion_dim = 0;
};

ResourceReport resource_report(Scheme scheme, int L, int N, int tau_p);

}  // namespace macesim
