#include "eiginf/inference.hpp"

#include "eiginf/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace eiginf {

std::vector<std::vector<int>> enumerate_hypotheses(const std::vector<double>& signal_eigs, int K_max,
                                                   const hypothesis_constraints& cons)
{
    const int n = static_cast<int>(signal_eigs.size());
    if (n == 0) throw contract_error("enumerate_hypotheses: no signal eigenvalues");
    if (K_max < 1) throw contract_error("enumerate_hypotheses: K_max must be >= 1");

    double tau = cons.tau >= 0.0 ? cons.tau : (n <= 16 ? 0.0 : 2.5);
    std::vector<bool> cut_ok(n, true);  // cut before position i
    if (tau > 0.0 && n > 2) {
        std::vector<double> gaps;
        for (int i = 1; i < n; ++i) gaps.push_back(signal_eigs[i] - signal_eigs[i - 1]);
        std::vector<double> sorted = gaps;
        std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
        double med = sorted[sorted.size() / 2];
        for (int i = 1; i < n; ++i) cut_ok[i] = gaps[i - 1] > tau * med;
    }

    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int start) {
        if (start == n) {
            out.push_back(cur);
            return;
        }
        if (static_cast<int>(cur.size()) == K_max) return;
        for (int end = start + 1; end <= n; ++end) {
            if (end < n && !cut_ok[end]) continue;
            int size = end - start;
            if (cons.even_sizes && size % 2) continue;
            cur.push_back(size);
            rec(end);
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

std::vector<double> score_grid(const score_options& opt)
{
    return linspace(opt.x_lo, opt.x_hi, opt.points);
}

double empirical_stieltjes(const std::vector<double>& lambdas, double x)
{
    double s = 0.0;
    for (double l : lambdas) s += 1.0 / (l - x);
    return s / static_cast<double>(lambdas.size());
}

cluster_hypothesis score_hypothesis(const std::vector<int>& n_hats, const eigen_sample& s,
                                    noise_level noise, const score_options& opt)
{
    cluster_hypothesis h;
    h.n_hats = n_hats;
    estimate_set est = estimate_stieltjes(s, n_hats);
    h.estimates = est.estimates;
    for (double v : h.estimates) {
        if (!std::isfinite(v) || !(v > 0.0)) {
            h.diagnostic = "non-positive or non-finite power estimate";
            return h;
        }
    }
    const int n = std::accumulate(n_hats.begin(), n_hats.end(), 0);
    try {
        power_profile prof(h.estimates, n_hats);
        ratios r{static_cast<double>(s.N) / n, static_cast<double>(s.M) / s.N};
        std::vector<double> xs = score_grid(opt);
        std::vector<double> model = m_F_negative_axis(xs, prof, r, noise);
        double acc = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) acc += std::abs(empirical_stieltjes(s.lambdas, xs[i]) - model[i]);
        h.score = acc / static_cast<double>(xs.size());
    } catch (const error& e) {
        h.diagnostic = e.what();
        h.score = std::numeric_limits<double>::infinity();
    }
    return h;
}

inference_result infer_joint(const eigen_sample& s, int n, int K_max, noise_level noise,
                             const inference_options& opt)
{
    if (n < 1 || n >= s.N) throw contract_error("infer_joint: needs 1 <= n < N");
    std::vector<double> signal(s.lambdas.end() - n, s.lambdas.end());

    inference_result res;
    res.sigma2_used = noise.sigma2;
    if (opt.blind_sigma2) {
        double acc = 0.0;
        for (int i = 0; i < s.N - n; ++i) acc += s.lambdas[i];
        res.sigma2_used = acc / (s.N - n);
    }

    for (const auto& sk : enumerate_hypotheses(signal, K_max, opt.constraints))
        res.ranking.push_back(score_hypothesis(sk, s, noise_level(res.sigma2_used), opt.scoring));
    std::stable_sort(res.ranking.begin(), res.ranking.end(), [](const auto& a, const auto& b) {
        if (a.score != b.score) return a.score < b.score;
        return a.n_hats < b.n_hats;
    });
    if (res.ranking.empty() || !std::isfinite(res.ranking.front().score))
        throw numerical_error("infer_joint: no hypothesis produced a finite score");
    res.best = res.ranking.front();
    return res;
}

} // namespace eiginf
