#include "eiginf/model.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace eiginf {

namespace {

constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;
constexpr double two_pi = 6.28318530717958647692;

enum : std::uint64_t { tag_channel = 1, tag_symbols = 2, tag_noise = 3 };

std::uint64_t to_le(std::uint64_t v)
{
    if constexpr (std::endian::native == std::endian::little)
        return v;
    else
        return __builtin_bswap64(v);
}

} // namespace

std::uint64_t splitmix64(std::uint64_t x)
{
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t tag, std::uint64_t trial)
{
    std::uint64_t h = splitmix64(seed + golden_gamma);
    h = splitmix64(h ^ (tag * golden_gamma + 0x632BE59BD9B4E019ULL));
    return splitmix64(h ^ (trial + 0xD6E8FEB86659FD93ULL));
}

std::uint64_t counter_rng::at(std::uint64_t i) const
{
    return splitmix64(key_ + (i + 1) * golden_gamma);
}

double counter_rng::uniform_at(std::uint64_t i) const
{
    return (static_cast<double>(at(i) >> 11) + 0.5) * 0x1.0p-53;
}

std::complex<double> counter_rng::complex_normal_at(std::uint64_t i) const
{
    double u1 = uniform_at(2 * i);
    double u2 = uniform_at(2 * i + 1);
    double r = std::sqrt(-std::log(u1));
    return {r * std::cos(two_pi * u2), r * std::sin(two_pi * u2)};
}

std::complex<double> counter_rng::qpsk_at(std::uint64_t i) const
{
    static const double h = 1.0 / std::sqrt(2.0);
    std::uint64_t b = at(i);
    return {(b & 1) ? h : -h, (b & 2) ? h : -h};
}

Eigen::MatrixXcd draw_channel(const scenario_spec& spec, std::uint64_t trial)
{
    const int N = spec.shape.N, n = spec.shape.n;
    counter_rng rng(stream_key(spec.seed, tag_channel, trial));
    const double s = 1.0 / std::sqrt(static_cast<double>(N));
    Eigen::MatrixXcd H(N, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < N; ++i) H(i, j) = s * rng.complex_normal_at(std::uint64_t(j) * N + i);
    return H;
}

Eigen::MatrixXcd draw_symbols(const scenario_spec& spec, std::uint64_t trial)
{
    const int n = spec.shape.n, M = spec.shape.M;
    counter_rng rng(stream_key(spec.seed, tag_symbols, trial));
    Eigen::MatrixXcd X(n, M);
    for (int j = 0; j < M; ++j)
        for (int i = 0; i < n; ++i) {
            std::uint64_t idx = std::uint64_t(j) * n + i;
            X(i, j) = spec.signal == constellation::qpsk ? rng.qpsk_at(idx) : rng.complex_normal_at(idx);
        }
    return X;
}

Eigen::MatrixXcd draw_noise(const scenario_spec& spec, std::uint64_t trial)
{
    const int N = spec.shape.N, M = spec.shape.M;
    counter_rng rng(stream_key(spec.seed, tag_noise, trial));
    Eigen::MatrixXcd W(N, M);
    for (int j = 0; j < M; ++j)
        for (int i = 0; i < N; ++i) W(i, j) = rng.complex_normal_at(std::uint64_t(j) * N + i);
    return W;
}

sample_draw draw(const scenario_spec& spec, std::uint64_t trial, const draw_options& opt)
{
    const int N = spec.shape.N, M = spec.shape.M;
    if (spec.shape.n != spec.profile.n() && !spec.profile.empty())
        throw contract_error("draw: shape.n differs from the profile's total multiplicity");
    if (static_cast<double>(N) * M > opt.max_elements)
        throw resource_error("draw: N*M exceeds the configured element cap");

    Eigen::MatrixXcd Y = std::sqrt(spec.noise.sigma2) * draw_noise(spec, trial);
    if (!spec.profile.empty()) {
        Eigen::VectorXd sp(spec.shape.n);
        int pos = 0;
        for (int k = 0; k < spec.profile.K(); ++k)
            for (int r = 0; r < spec.profile.multiplicities()[k]; ++r) sp(pos++) = std::sqrt(spec.profile.powers()[k]);
        Eigen::MatrixXcd HP = draw_channel(spec, trial) * sp.asDiagonal();
        Y.noalias() += HP * draw_symbols(spec, trial);
    }

    Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(N, N);
    B.selfadjointView<Eigen::Lower>().rankUpdate(Y, 1.0 / M);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(B, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw numerical_error("draw: Hermitian eigensolver failed");

    sample_draw out;
    out.eigenvalues.resize(N);
    for (int i = 0; i < N; ++i) out.eigenvalues[i] = std::max(0.0, es.eigenvalues()(i));
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
    if (opt.keep_matrix) out.Y = std::move(Y);
    return out;
}

double snr_to_sigma2(double snr_db)
{
    return std::pow(10.0, -snr_db / 10.0);
}

scenario_spec scenario_a(int n_total, double snr_db, std::uint64_t seed)
{
    if (n_total < 3 || n_total % 3 != 0)
        throw contract_error("scenario_a: n_total must be a positive multiple of 3");
    scenario_spec s;
    int nk = n_total / 3;
    s.profile = power_profile({1.0, 3.0, 10.0}, {nk, nk, nk});
    int N = 10 * n_total;
    s.shape = system_shape(N, 10 * N, n_total);
    s.noise = noise_level(snr_to_sigma2(snr_db));
    s.seed = seed;
    return s;
}

scenario_spec scenario_b(double snr_db, std::uint64_t seed)
{
    scenario_spec s;
    s.profile = power_profile({1.0 / 16, 1.0 / 4, 1.0}, {4, 4, 4});
    s.shape = system_shape(24, 128, 12);
    s.noise = noise_level(snr_to_sigma2(snr_db));
    s.seed = seed;
    return s;
}

void write_raw_matrix(const std::string& path, const Eigen::MatrixXcd& Y)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw resource_error("write_raw_matrix: cannot open " + path);
    os.write("EIGINFY1", 8);
    auto put = [&](std::uint64_t v) {
        v = to_le(v);
        os.write(reinterpret_cast<const char*>(&v), 8);
    };
    put(static_cast<std::uint64_t>(Y.rows()));
    put(static_cast<std::uint64_t>(Y.cols()));
    for (Eigen::Index i = 0; i < Y.rows(); ++i)
        for (Eigen::Index j = 0; j < Y.cols(); ++j) {
            put(std::bit_cast<std::uint64_t>(Y(i, j).real()));
            put(std::bit_cast<std::uint64_t>(Y(i, j).imag()));
        }
    if (!os) throw resource_error("write_raw_matrix: write failed for " + path);
}

Eigen::MatrixXcd read_raw_matrix(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw resource_error("read_raw_matrix: cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, "EIGINFY1", 8) != 0)
        throw contract_error("read_raw_matrix: bad magic in " + path);
    auto get = [&]() {
        std::uint64_t v = 0;
        is.read(reinterpret_cast<char*>(&v), 8);
        if (!is) throw contract_error("read_raw_matrix: truncated file " + path);
        return to_le(v);
    };
    std::uint64_t N = get(), M = get();
    Eigen::MatrixXcd Y(N, M);
    for (std::uint64_t i = 0; i < N; ++i)
        for (std::uint64_t j = 0; j < M; ++j) {
            double re = std::bit_cast<double>(get());
            double im = std::bit_cast<double>(get());
            Y(i, j) = {re, im};
        }
    return Y;
}

} // namespace eiginf
