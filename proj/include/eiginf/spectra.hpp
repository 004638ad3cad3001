#pragma once

#include "eiginf/types.hpp"

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace eiginf {

using cplx = std::complex<double>;

// Evaluators of the inverse Stieltjes map of G (the spectrum of H P H^H).
double x_G(double m, const power_profile& p, double c0);
double x_G_prime(double m, const power_profile& p, double c0);
double x_G_second(double m, const power_profile& p, double c0);

// Left side of the inflexion equation, sum_r (1/c_r) (P_r m)^3 / (1 + P_r m)^3.
double inflexion_sum(double m, const power_profile& p, double c0);

struct g_cluster {
    double m_lo = 0.0;  // boundary root whose image is the left edge
    double m_hi = 0.0;
    double x_lo = 0.0;
    double x_hi = 0.0;
    double mass = 0.0;  // sum of 1/c_k over the powers it carries
};

struct g_support {
    bool merged_at_zero = false;  // c0 <= 1, nothing is computed
    std::vector<g_cluster> clusters;
    std::vector<double> inflexion_roots;  // m_{G,1..K}
    double zero_mass = 0.0;               // (c0-1)/c0
    std::vector<int> power_to_cluster;    // 1-based cluster index per power

    int K_G() const { return static_cast<int>(clusters.size()); }
};

g_support support_G(const power_profile& p, double c0);

struct assumption1_result {
    bool ok = false;
    double m_left = 0.0;   // m_{G,k}
    double m_right = 0.0;  // m_{G,k+1}, 0 for k = K
    double lhs_left = 0.0;
    double lhs_right = 0.0;
    std::string note;
};

// k is 1-based.
assumption1_result check_assumption1(int k, const power_profile& p, double c0);

struct assumption2_result {
    bool ok = false;
    int k_G = 0;
    double m_left = 0.0;   // m_{F,k_G}
    double m_right = 0.0;  // m_{F,k_G+1}
    double lhs_left = 0.0;
    double lhs_right = 0.0;
    double x_left = 0.0;   // F cluster edge estimates
    double x_right = 0.0;
    std::string note;
};

assumption2_result check_assumption2(int k, const power_profile& p, ratios r, noise_level noise);

struct separability_report {
    std::vector<bool> assumption1_ok;
    std::vector<bool> assumption2_ok;
    std::vector<bool> separable;
    std::vector<double> m_F_roots;                   // j = 1..K_G+1
    std::vector<std::array<double, 2>> f_edges;      // one per G cluster
    std::string note;
};

separability_report separability(const power_profile& p, ratios r, noise_level noise);

// Smallest c0 at which Assumption 1 holds for every power. nullopt when
// no crossing exists below c0_max.
std::optional<double> critical_c0(const power_profile& p, double c0_max = 1e6);

// Smallest c at which Assumption 2 holds for every power at fixed c0.
std::optional<double> critical_c(const power_profile& p, double c0, noise_level noise,
                                 double c_max = 1e7);

struct stieltjes_point {
    cplx z;
    cplx m_F;
    cplx m_uF;
    cplx f;
    int iterations = 0;
    double residual = 0.0;
};

struct solver_options {
    int max_newton = 80;
    double accept_residual = 1e-8;
};

stieltjes_point solve_m_F(cplx z, const power_profile& p, ratios r, noise_level noise,
                          const solver_options& opt = {});

// Density of F at real x in the limit y -> 0 (0 outside the support).
double limit_density(double x, const power_profile& p, ratios r, noise_level noise);

// m_F on the negative real axis, tracked by continuation from -infinity.
// xs need not be sorted; all must be < 0.
std::vector<double> m_F_negative_axis(const std::vector<double>& xs, const power_profile& p,
                                      ratios r, noise_level noise);

struct density_curve {
    std::vector<double> grid;
    std::vector<double> density;
    double y_offset = 0.0;
    std::vector<std::array<double, 2>> support_intervals;
    double zero_mass = 0.0;             // mass of F at 0, max(0, 1-c)
    double co_spectrum_zero_mass = 0.0; // (c-1)/c when c > 1
    double integral() const;            // trapezoid over the grid
    // Cumulative distribution on the grid including the zero mass.
    std::vector<double> cdf() const;
};

// Rough upper bound of the support of F, used for default grids and offsets.
double support_scale(const power_profile& p, ratios r, noise_level noise);
double default_y_offset(const power_profile& p, ratios r, noise_level noise);

density_curve lsd_density(const std::vector<double>& grid, const power_profile& p, ratios r,
                          noise_level noise, double y_offset);

std::vector<double> linspace(double a, double b, int n);

} // namespace eiginf
