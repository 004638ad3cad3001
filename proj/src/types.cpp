#include "eiginf/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace eiginf {

power_profile::power_profile(std::vector<double> powers, std::vector<int> multiplicities)
{
    if (powers.size() != multiplicities.size())
        throw contract_error("power_profile: powers and multiplicities differ in length");
    std::vector<std::size_t> order(powers.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = 0; i < powers.size(); ++i) {
        if (!(powers[i] > 0.0) || !std::isfinite(powers[i]))
            throw contract_error("power_profile: powers must be finite and > 0");
        if (multiplicities[i] < 1)
            throw contract_error("power_profile: multiplicities must be >= 1");
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return powers[a] < powers[b]; });
    for (std::size_t idx : order) {
        if (!powers_.empty() && powers_.back() == powers[idx]) {
            mults_.back() += multiplicities[idx];
        } else {
            powers_.push_back(powers[idx]);
            mults_.push_back(multiplicities[idx]);
        }
    }
}

int power_profile::n() const
{
    return std::accumulate(mults_.begin(), mults_.end(), 0);
}

double power_profile::share(int k) const
{
    return static_cast<double>(mults_.at(k)) / n();
}

power_profile power_profile::scaled(double t) const
{
    std::vector<double> p = powers_;
    for (double& v : p) v *= t;
    return power_profile(p, mults_);
}

system_shape::system_shape(int N_, int M_, int n_) : N(N_), M(M_), n(n_)
{
    if (N < 1 || M < 1 || n < 1)
        throw contract_error("system_shape: N, M and n must all be >= 1");
}

noise_level::noise_level(double s2) : sigma2(s2)
{
    if (!(s2 >= 0.0) || !std::isfinite(s2))
        throw contract_error("noise_level: sigma2 must be finite and >= 0");
}

std::vector<double> power_weights(const power_profile& p, double c0)
{
    std::vector<double> w(p.K());
    for (int k = 0; k < p.K(); ++k) w[k] = p.share(k) / c0;
    return w;
}

} // namespace eiginf
