#include "eiginf/secular.hpp"

#include "eiginf/types.hpp"
#include "roots.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace eiginf {

namespace {

void check_input(const std::vector<double>& lambdas)
{
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!(lambdas[i] >= 0.0) || !std::isfinite(lambdas[i]))
            throw contract_error("secular: eigenvalues must be finite and >= 0");
        if (i > 0 && lambdas[i] < lambdas[i - 1])
            throw contract_error("secular: eigenvalues must be ascending");
    }
}

} // namespace

std::vector<double> rank_one_roots_dense(const std::vector<double>& lambdas, double w)
{
    const int n = static_cast<int>(lambdas.size());
    Eigen::VectorXd s(n);
    for (int i = 0; i < n; ++i) s(i) = std::sqrt(lambdas[i]);
    Eigen::MatrixXd A = -w * s * s.transpose();
    for (int i = 0; i < n; ++i) A(i, i) += lambdas[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw numerical_error("secular: dense eigensolver failed");
    std::vector<double> r(es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::sort(r.begin(), r.end());
    return r;
}

std::vector<double> rank_one_roots(const std::vector<double>& lambdas, double w)
{
    check_input(lambdas);
    if (!(w > 0.0)) throw contract_error("secular: weight must be > 0");

    std::vector<double> roots;
    roots.reserve(lambdas.size());

    // Distinct positive values with multiplicities. A value of multiplicity m
    // keeps m-1 roots at itself; zeros are roots outright.
    std::vector<double> d, om;
    std::size_t npos = 0;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        double v = lambdas[i];
        if (v == 0.0) {
            roots.push_back(0.0);
            continue;
        }
        ++npos;
        if (!d.empty() && d.back() == v) {
            roots.push_back(v);
            om.back() += w * v;
        } else {
            d.push_back(v);
            om.push_back(w * v);
        }
    }
    for (std::size_t j = 1; j < d.size(); ++j)
        if (d[j] - d[j - 1] < 1e-12 * d[j]) return rank_one_roots_dense(lambdas, w);

    const std::size_t p = d.size();
    double total = 0.0;
    for (double v : om) total += v;

    // h(tau) in coordinates shifted to the left end of the bracket.
    std::vector<double> delta(p);
    auto secular_at = [&](double tau) {
        double s = -1.0;
        for (std::size_t i = 0; i < p; ++i) s += om[i] / (delta[i] - tau);
        return s;
    };

    for (std::size_t j = 0; j < p; ++j) {
        double a, b;
        if (j == 0) {
            // h rises from -1 at -inf to +inf at d_0; h(0) = w * npos - 1.
            double h0 = w * static_cast<double>(npos) - 1.0;
            if (std::abs(h0) <= 4e-16) {
                roots.push_back(0.0);
                continue;
            }
            a = h0 < 0.0 ? 0.0 : -total;
            b = d[0];
        } else {
            a = d[j - 1];
            b = d[j];
        }
        for (std::size_t i = 0; i < p; ++i) delta[i] = d[i] - a;
        double tau = detail::bisect(secular_at, 0.0, b - a, -1);
        roots.push_back(a + tau);
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

std::vector<double> etas(const std::vector<double>& lambdas, int N)
{
    if (N < 1 || static_cast<std::size_t>(N) != lambdas.size())
        throw contract_error("etas: lambdas must have length N");
    return rank_one_roots(lambdas, 1.0 / N);
}

std::vector<double> mus(const std::vector<double>& lambdas, int N, int M)
{
    if (N < 1 || static_cast<std::size_t>(N) != lambdas.size())
        throw contract_error("mus: lambdas must have length N");
    if (M < 1) throw contract_error("mus: M must be >= 1");
    return rank_one_roots(lambdas, 1.0 / M);
}

eigen_sample make_eigen_sample(std::vector<double> lambdas, int M)
{
    std::sort(lambdas.begin(), lambdas.end());
    eigen_sample s;
    s.N = static_cast<int>(lambdas.size());
    s.M = M;
    s.etas = etas(lambdas, s.N);
    s.mus = mus(lambdas, s.N, M);
    s.lambdas = std::move(lambdas);
    return s;
}

} // namespace eiginf
