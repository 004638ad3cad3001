#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace eiginf {

// Error taxonomy. The CLI maps these onto exit codes.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class contract_error : public error {
public:
    using error::error;
};

class domain_error : public error {
public:
    using error::error;
};

class numerical_error : public error {
public:
    using error::error;
};

class resource_error : public error {
public:
    using error::error;
};

class config_error : public error {
public:
    using error::error;
};

// Distinct transmit powers in ascending order with their antenna counts.
class power_profile {
public:
    power_profile() = default;
    // Sorts and merges equal powers.
    power_profile(std::vector<double> powers, std::vector<int> multiplicities);

    const std::vector<double>& powers() const { return powers_; }
    const std::vector<int>& multiplicities() const { return mults_; }
    int K() const { return static_cast<int>(powers_.size()); }
    int n() const;
    bool empty() const { return powers_.empty(); }

    // Fraction n_k / n of the signal dimension carried by power k.
    double share(int k) const;

    power_profile scaled(double t) const;

private:
    std::vector<double> powers_;
    std::vector<int> mults_;
};

// Asymptotic ratios. c = M/N, c0 = N/n. Per-power ratio c_k = c0 * n / n_k.
struct ratios {
    double c0 = 0.0;
    double c = 0.0;
};

struct system_shape {
    int N = 0;
    int M = 0;
    int n = 0;

    system_shape() = default;
    system_shape(int N_, int M_, int n_);

    double c() const { return static_cast<double>(M) / N; }
    double c0() const { return static_cast<double>(N) / n; }
    double ck(int nk) const { return static_cast<double>(N) / nk; }
    eiginf::ratios ratios() const { return {c0(), c()}; }
};

struct noise_level {
    double sigma2 = 0.0;

    noise_level() = default;
    explicit noise_level(double s2);
};

// 1/c_k for each power: n_k / N expressed through c0.
std::vector<double> power_weights(const power_profile& p, double c0);

} // namespace eiginf
