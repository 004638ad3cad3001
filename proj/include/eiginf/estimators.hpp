#pragma once

#include "eiginf/secular.hpp"
#include "eiginf/types.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace eiginf {

enum class estimator_kind { stieltjes, classical, moment };

std::string to_string(estimator_kind k);
estimator_kind estimator_from_string(const std::string& s);

struct estimate_set {
    estimator_kind method = estimator_kind::stieltjes;
    std::vector<double> estimates;  // aligned with the multiplicities passed in
    std::optional<double> sigma2_hat;
    bool complex_roots_encountered = false;
    bool infeasible_moments = false;
    bool separability_assumed = true;
};

struct stieltjes_options {
    // Use the alternative M = N prefactor N/(n_k(N-n)) instead of the limit N^2/n_k.
    bool equal_dims_literal = false;
};

// Multiplicities index the top n = sum n_k eigenvalue positions, ascending.
estimate_set estimate_stieltjes(const eigen_sample& s, const std::vector<int>& mults,
                                const stieltjes_options& opt = {});
estimate_set estimate_classical(const eigen_sample& s, const std::vector<int>& mults);
estimate_set estimate_moment(const eigen_sample& s, const std::vector<int>& mults, noise_level noise);

// Asymptotic moment map. y = 1/c = N/M, y0 = 1/c0 = n/N.
// Power moments p_j = sum_k (n_k/n) P_k^j (j = 1..3) to moments of F.
std::array<double, 3> forward_moments(const std::array<double, 3>& p, double sigma2, double c0, double c);
// Inverse of forward_moments.
std::array<double, 3> inverse_moments(const std::array<double, 3>& b, double sigma2, double c0, double c);

} // namespace eiginf
