#pragma once

#include "eiginf/types.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace eiginf {

// SplitMix64 used in counter mode: value i of a stream is the SplitMix64
// finalizer applied to key + (i+1)*gamma. Any entry of any matrix can be
// generated independently of the others, so output never depends on
// evaluation order or thread count.
class counter_rng {
public:
    explicit counter_rng(std::uint64_t key) : key_(key) {}

    std::uint64_t at(std::uint64_t i) const;
    // Uniform on (0, 1), 53-bit resolution.
    double uniform_at(std::uint64_t i) const;
    // Circularly-symmetric complex Gaussian, E|z|^2 = 1. Uses counters 2i, 2i+1.
    std::complex<double> complex_normal_at(std::uint64_t i) const;
    // Uniform over {+-1 +- i}/sqrt(2).
    std::complex<double> qpsk_at(std::uint64_t i) const;

private:
    std::uint64_t key_;
};

std::uint64_t splitmix64(std::uint64_t x);
// Stream key for (seed, matrix tag, trial index).
std::uint64_t stream_key(std::uint64_t seed, std::uint64_t tag, std::uint64_t trial);

enum class constellation { qpsk, gaussian };

struct scenario_spec {
    power_profile profile;
    system_shape shape;
    noise_level noise;
    constellation signal = constellation::qpsk;
    std::uint64_t seed = 0;
};

struct draw_options {
    bool keep_matrix = false;
    double max_elements = 2.5e7;  // cap on N*M
};

struct sample_draw {
    std::vector<double> eigenvalues;  // ascending, length N
    std::optional<Eigen::MatrixXcd> Y;
};

// The three random matrices of one trial. Exposed for tests.
Eigen::MatrixXcd draw_channel(const scenario_spec& spec, std::uint64_t trial);
Eigen::MatrixXcd draw_symbols(const scenario_spec& spec, std::uint64_t trial);
Eigen::MatrixXcd draw_noise(const scenario_spec& spec, std::uint64_t trial);

sample_draw draw(const scenario_spec& spec, std::uint64_t trial = 0, const draw_options& opt = {});

scenario_spec scenario_a(int n_total, double snr_db, std::uint64_t seed = 0);
scenario_spec scenario_b(double snr_db, std::uint64_t seed = 0);
double snr_to_sigma2(double snr_db);

// Little-endian layout: 8-byte magic "EIGINFY1", uint64 N, uint64 M, then
// N*M (re, im) float64 pairs in row-major order.
void write_raw_matrix(const std::string& path, const Eigen::MatrixXcd& Y);
Eigen::MatrixXcd read_raw_matrix(const std::string& path);

} // namespace eiginf
