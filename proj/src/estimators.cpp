#include "eiginf/estimators.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

namespace eiginf {

std::string to_string(estimator_kind k)
{
    switch (k) {
    case estimator_kind::stieltjes: return "stieltjes";
    case estimator_kind::classical: return "classical";
    case estimator_kind::moment: return "moment";
    }
    return "unknown";
}

estimator_kind estimator_from_string(const std::string& s)
{
    if (s == "stieltjes") return estimator_kind::stieltjes;
    if (s == "classical") return estimator_kind::classical;
    if (s == "moment") return estimator_kind::moment;
    throw config_error("unknown estimator '" + s + "'");
}

namespace {

int checked_total(const std::vector<int>& mults)
{
    if (mults.empty()) throw contract_error("estimator: no multiplicities given");
    for (int v : mults)
        if (v < 1) throw contract_error("estimator: multiplicities must be >= 1");
    return std::accumulate(mults.begin(), mults.end(), 0);
}

} // namespace

estimate_set estimate_stieltjes(const eigen_sample& s, const std::vector<int>& mults,
                                const stieltjes_options& opt)
{
    const int n = checked_total(mults);
    const int N = s.N, M = s.M;
    if (n > N) throw contract_error("estimate_stieltjes: sum of multiplicities exceeds N");
    estimate_set out;
    out.method = estimator_kind::stieltjes;
    int pos = N - n;
    if (M != N) {
        const double scale = static_cast<double>(N) * M / (M - N);
        for (int nk : mults) {
            double acc = 0.0;
            for (int i = pos; i < pos + nk; ++i) acc += s.mus[i] - s.etas[i];
            out.estimates.push_back(scale * acc / nk);
            pos += nk;
        }
        return out;
    }
    if (n == N) throw contract_error("estimate_stieltjes: M = N with n = N divides by zero");
    for (int nk : mults) {
        double acc = 0.0;
        for (int i = pos; i < pos + nk; ++i) {
            double eta = s.etas[i], d = 0.0;
            for (double l : s.lambdas) {
                double g = l - eta;
                d += eta / (g * g);
            }
            acc += 1.0 / d;
        }
        double pre = opt.equal_dims_literal ? static_cast<double>(N) / (static_cast<double>(nk) * (N - n))
                                            : static_cast<double>(N) * N / nk;
        out.estimates.push_back(pre * acc);
        pos += nk;
    }
    return out;
}

estimate_set estimate_classical(const eigen_sample& s, const std::vector<int>& mults)
{
    const int n = checked_total(mults);
    const int N = s.N;
    if (n >= N) throw contract_error("estimate_classical: needs n < N");
    estimate_set out;
    out.method = estimator_kind::classical;
    double s2 = 0.0;
    for (int i = 0; i < N - n; ++i) s2 += s.lambdas[i];
    s2 /= (N - n);
    out.sigma2_hat = s2;
    int pos = N - n;
    for (int nk : mults) {
        double acc = 0.0;
        for (int i = pos; i < pos + nk; ++i) acc += s.lambdas[i] - s2;
        out.estimates.push_back(acc / nk);
        pos += nk;
    }
    return out;
}

// Derivation sketch (series of the limiting equations at z -> infinity):
// F^P -> moments a_j of the population covariance on the n signal
// dimensions mixed with H (a free compression with ratio y0), scaled by 1/c0
// for the N-dimensional view, shifted by sigma2, then compounded by the
// Marchenko-Pastur step of ratio y.
std::array<double, 3> forward_moments(const std::array<double, 3>& p, double sigma2, double c0, double c)
{
    const double y0 = 1.0 / c0, y = 1.0 / c, s = sigma2;
    double a1 = p[0];
    double a2 = p[1] + y0 * p[0] * p[0];
    double a3 = p[2] + 3.0 * y0 * p[0] * p[1] + y0 * y0 * p[0] * p[0] * p[0];
    double g1 = a1 / c0, g2 = a2 / c0, g3 = a3 / c0;
    double t1 = g1 + s;
    double t2 = g2 + 2.0 * s * g1 + s * s;
    double t3 = g3 + 3.0 * s * g2 + 3.0 * s * s * g1 + s * s * s;
    double b1 = t1;
    double b2 = t2 + y * t1 * t1;
    double b3 = t3 + 3.0 * y * t1 * t2 + y * y * t1 * t1 * t1;
    return {b1, b2, b3};
}

std::array<double, 3> inverse_moments(const std::array<double, 3>& b, double sigma2, double c0, double c)
{
    const double y0 = 1.0 / c0, y = 1.0 / c, s = sigma2;
    double t1 = b[0];
    double t2 = b[1] - y * t1 * t1;
    double t3 = b[2] - 3.0 * y * t1 * t2 - y * y * t1 * t1 * t1;
    double g1 = t1 - s;
    double g2 = t2 - 2.0 * s * g1 - s * s;
    double g3 = t3 - 3.0 * s * g2 - 3.0 * s * s * g1 - s * s * s;
    double a1 = c0 * g1, a2 = c0 * g2, a3 = c0 * g3;
    double p1 = a1;
    double p2 = a2 - y0 * p1 * p1;
    double p3 = a3 - 3.0 * y0 * p1 * p2 - y0 * y0 * p1 * p1 * p1;
    return {p1, p2, p3};
}

estimate_set estimate_moment(const eigen_sample& s, const std::vector<int>& mults, noise_level noise)
{
    const int n = checked_total(mults);
    const int K = static_cast<int>(mults.size());
    if (K > 3) throw contract_error("estimate_moment: only K <= 3 is implemented");
    const int N = s.N;
    if (n > N) throw contract_error("estimate_moment: sum of multiplicities exceeds N");
    const double c0 = static_cast<double>(N) / n, c = static_cast<double>(s.M) / N;

    std::array<double, 3> b{0.0, 0.0, 0.0};
    for (double l : s.lambdas) {
        b[0] += l;
        b[1] += l * l;
        b[2] += l * l * l;
    }
    for (double& v : b) v /= N;
    std::array<double, 3> p = inverse_moments(b, noise.sigma2, c0, c);

    estimate_set out;
    out.method = estimator_kind::moment;
    if (K >= 2 && p[1] < p[0] * p[0]) out.infeasible_moments = true;

    // Newton-Girard on equal-weight power sums s_j = K p_j.
    std::array<double, 3> ps{K * p[0], K * p[1], K * p[2]};
    std::array<double, 4> e{1.0, 0.0, 0.0, 0.0};
    e[1] = ps[0];
    if (K >= 2) e[2] = (e[1] * ps[0] - ps[1]) / 2.0;
    if (K >= 3) e[3] = (e[2] * ps[0] - e[1] * ps[1] + ps[2]) / 3.0;

    std::vector<std::complex<double>> roots;
    if (K == 1) {
        roots.push_back(e[1]);
    } else {
        // monic x^K - e1 x^{K-1} + e2 x^{K-2} - ...
        Eigen::MatrixXd C = Eigen::MatrixXd::Zero(K, K);
        for (int i = 1; i < K; ++i) C(i, i - 1) = 1.0;
        for (int i = 0; i < K; ++i) {
            int j = K - i;  // coefficient of x^i is (-1)^j e_j
            C(i, K - 1) = -((j % 2) ? -e[j] : e[j]);
        }
        Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
        for (int i = 0; i < K; ++i) roots.push_back(es.eigenvalues()(i));
    }
    double scale = 0.0;
    for (auto& r : roots) scale = std::max(scale, std::abs(r));
    std::vector<double> est;
    for (auto& r : roots) {
        if (std::abs(r.imag()) > 1e-9 * std::max(scale, 1e-300)) out.complex_roots_encountered = true;
        est.push_back(r.real());
    }
    std::sort(est.begin(), est.end());

    // Unequal multiplicities: refine on the weighted moment equations.
    bool equal = std::all_of(mults.begin(), mults.end(), [&](int v) { return v == mults[0]; });
    if (!equal && !out.complex_roots_encountered) {
        Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(est.data(), K);
        Eigen::VectorXd w(K);
        for (int k = 0; k < K; ++k) w(k) = static_cast<double>(mults[k]) / n;
        bool ok = false;
        for (int it = 0; it < 100; ++it) {
            Eigen::VectorXd F(K);
            Eigen::MatrixXd J(K, K);
            for (int j = 0; j < K; ++j) {
                F(j) = -p[j];
                for (int k = 0; k < K; ++k) {
                    F(j) += w(k) * std::pow(x(k), j + 1);
                    J(j, k) = (j + 1) * w(k) * std::pow(x(k), j);
                }
            }
            Eigen::VectorXd dx = J.fullPivLu().solve(F);
            if (!dx.allFinite()) break;
            x -= dx;
            if (dx.norm() <= 1e-13 * std::max(1.0, x.norm())) {
                ok = true;
                break;
            }
        }
        if (ok) est.assign(x.data(), x.data() + K);
    }
    out.estimates = est;
    return out;
}

} // namespace eiginf
