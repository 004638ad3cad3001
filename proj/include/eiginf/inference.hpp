#pragma once

#include "eiginf/estimators.hpp"
#include "eiginf/secular.hpp"
#include "eiginf/types.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace eiginf {

struct hypothesis_constraints {
    // Gap threshold as a multiple of the median gap. Negative selects the
    // default: 0 (exhaustive) for n <= 16, 2.5 above.
    double tau = -1.0;
    bool even_sizes = false;
};

// Compositions of the n signal eigenvalues into 1..K_max contiguous groups.
std::vector<std::vector<int>> enumerate_hypotheses(const std::vector<double>& signal_eigs, int K_max,
                                                   const hypothesis_constraints& cons = {});

struct cluster_hypothesis {
    std::vector<int> n_hats;
    double score = std::numeric_limits<double>::infinity();
    std::vector<double> estimates;
    std::string diagnostic;

    int K_hat() const { return static_cast<int>(n_hats.size()); }
};

struct score_options {
    double x_lo = -1.0;
    double x_hi = -0.1;
    int points = 46;
};

std::vector<double> score_grid(const score_options& opt);

// Empirical Stieltjes transform (1/N) sum 1/(lambda_i - x).
double empirical_stieltjes(const std::vector<double>& lambdas, double x);

cluster_hypothesis score_hypothesis(const std::vector<int>& n_hats, const eigen_sample& s,
                                    noise_level noise, const score_options& opt = {});

struct inference_options {
    hypothesis_constraints constraints;
    score_options scoring;
    // Replace the supplied sigma2 by the mean of the noise-cluster eigenvalues.
    bool blind_sigma2 = false;
};

struct inference_result {
    cluster_hypothesis best;
    std::vector<cluster_hypothesis> ranking;
    double sigma2_used = 0.0;
};

inference_result infer_joint(const eigen_sample& s, int n, int K_max, noise_level noise,
                             const inference_options& opt = {});

} // namespace eiginf
