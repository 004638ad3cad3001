#pragma once

#include <vector>

namespace eiginf {

// Eigenvalues of diag(lambda) - w sqrt(lambda) sqrt(lambda)^T, ascending.
// Solves the secular equation sum w lambda_i / (lambda_i - x) = 1 by
// bisection between consecutive distinct values. Exact ties and zeros are
// deflated; near-ties (relative spacing below 1e-12) use the dense path.
std::vector<double> rank_one_roots(const std::vector<double>& lambdas, double w);

// Same matrix, dense symmetric eigensolver. Used as oracle and fallback.
std::vector<double> rank_one_roots_dense(const std::vector<double>& lambdas, double w);

std::vector<double> etas(const std::vector<double>& lambdas, int N);
std::vector<double> mus(const std::vector<double>& lambdas, int N, int M);

struct eigen_sample {
    std::vector<double> lambdas;
    std::vector<double> etas;
    std::vector<double> mus;
    int N = 0;
    int M = 0;
};

// Sorts lambdas and computes both root sets.
eigen_sample make_eigen_sample(std::vector<double> lambdas, int M);

} // namespace eiginf
