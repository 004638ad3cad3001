#include "eiginf/spectra.hpp"

#include "roots.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace eiginf {

namespace {

constexpr double pi = 3.14159265358979323846;

void check_pole(double m, const power_profile& p)
{
    const double tol = 1e-14;
    if (std::abs(m) < tol)
        throw domain_error("x_G: m = 0 is a pole");
    for (double P : p.powers()) {
        if (std::abs(1.0 + P * m) < tol) {
            std::ostringstream os;
            os << "x_G: m = " << m << " is the pole -1/P for P = " << P;
            throw domain_error(os.str());
        }
    }
}

double x_G_raw(double m, const power_profile& p, const std::vector<double>& w)
{
    double s = -1.0 / m;
    for (int k = 0; k < p.K(); ++k) {
        double P = p.powers()[k];
        s += w[k] * P / (1.0 + P * m);
    }
    return s;
}

double x_G_prime_raw(double m, const power_profile& p, const std::vector<double>& w)
{
    double s = 1.0 / (m * m);
    for (int k = 0; k < p.K(); ++k) {
        double P = p.powers()[k];
        double d = 1.0 + P * m;
        s -= w[k] * P * P / (d * d);
    }
    return s;
}

double power_sum(double m, const power_profile& p, const std::vector<double>& w, int order)
{
    double s = 0.0;
    for (int k = 0; k < p.K(); ++k) {
        double u = p.powers()[k] * m;
        s += w[k] * std::pow(u / (1.0 + u), order);
    }
    return s;
}

// Discrete measure on the shifted G support, used by the F-side conditions:
// the noise atom at sigma2 plus every G cluster collapsed to one of its edges.
struct f_measure {
    std::vector<double> t;
    std::vector<double> w;

    double sum(double m, int order) const
    {
        double s = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            double u = t[i] * m;
            s += w[i] * std::pow(u / (1.0 + u), order);
        }
        return s;
    }

    double bound(double m, double c) const
    {
        double s = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) s += w[i] * t[i] / (1.0 + t[i] * m);
        return -1.0 / m + s / c;
    }
};

// Equation index j is 1-based, j = 1..K_G+1.
f_measure build_f_measure(const g_support& gs, double sigma2, int j)
{
    f_measure fm;
    fm.t.push_back(sigma2);
    fm.w.push_back(gs.zero_mass);
    for (int r = 1; r <= gs.K_G(); ++r) {
        const g_cluster& cl = gs.clusters[r - 1];
        fm.t.push_back((r < j ? cl.x_hi : cl.x_lo) + sigma2);
        fm.w.push_back(cl.mass);
    }
    return fm;
}

struct f_side {
    std::vector<double> roots;  // m_{F,j}, j = 1..K_G+1
    std::vector<f_measure> measures;
    double m_edge = 0.0;        // zero of the bound derivative right of the last cluster
};

f_side solve_f_side(const g_support& gs, double c, double sigma2)
{
    f_side out;
    int KG = gs.K_G();
    for (int j = 1; j <= KG + 1; ++j) {
        f_measure fm = build_f_measure(gs, sigma2, j);
        double t_left = j == 1 ? sigma2 : gs.clusters[j - 2].x_hi + sigma2;
        if (j <= KG) {
            double t_right = gs.clusters[j - 1].x_lo + sigma2;
            double a = -1.0 / t_left, b = -1.0 / t_right;
            auto fn = [&](double m) { return fm.sum(m, 3) - c; };
            out.roots.push_back(detail::bisect(fn, a, b, -1));
        } else {
            // No root on (-1/t_left, 0): every term is negative there.
            out.roots.push_back(0.0);
            auto fn = [&](double m) { return fm.sum(m, 2) - c; };
            out.m_edge = detail::bisect(fn, -1.0 / t_left, 0.0, +1);
        }
        out.measures.push_back(std::move(fm));
    }
    return out;
}

// ---- polynomial helpers for the limiting-spectrum solver ----

using poly = std::vector<cplx>;  // ascending coefficients

poly pmul(const poly& a, const poly& b)
{
    poly r(a.size() + b.size() - 1, cplx(0.0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

void padd(poly& acc, const poly& b, cplx s)
{
    if (acc.size() < b.size()) acc.resize(b.size(), cplx(0.0));
    for (std::size_t i = 0; i < b.size(); ++i) acc[i] += s * b[i];
}

poly shift_up(const poly& a)  // multiply by f
{
    poly r(a.size() + 1, cplx(0.0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i + 1] = a[i];
    return r;
}

std::vector<cplx> poly_roots(poly a)
{
    double scale = 0.0;
    for (const cplx& v : a) scale = std::max(scale, std::abs(v));
    while (a.size() > 1 && std::abs(a.back()) <= 1e-15 * scale) a.pop_back();
    int d = static_cast<int>(a.size()) - 1;
    if (d < 1) return {};
    if (d == 1) return {-a[0] / a[1]};
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 1; i < d; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < d; ++i) C(i, d - 1) = -a[i] / a[d];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
    if (es.info() != Eigen::Success) throw numerical_error("solve_m_F: companion eigensolver failed");
    std::vector<cplx> r(d);
    for (int i = 0; i < d; ++i) r[i] = es.eigenvalues()[i];
    return r;
}

// g(f) = -sigma2 + 1/f - sum a_k/(1+P_k f), with m_uF = 1/g(f).
template <class T>
struct g_eval {
    const std::vector<double>& P;
    const std::vector<double>& a;
    double sigma2;

    T g(T f) const
    {
        T s = -sigma2 + 1.0 / f;
        for (std::size_t k = 0; k < P.size(); ++k) s -= a[k] / (1.0 + P[k] * f);
        return s;
    }
    T dg(T f) const
    {
        T s = -1.0 / (f * f);
        for (std::size_t k = 0; k < P.size(); ++k) {
            T d = 1.0 + P[k] * f;
            s += a[k] * P[k] / (d * d);
        }
        return s;
    }
    // R(f) = f g^2 - (1-c) g + c z and its derivative.
    void residual(T f, double c, T z, T& R, T& dR) const
    {
        T gv = g(f), gp = dg(f);
        R = f * gv * gv - (1.0 - c) * gv + c * z;
        dR = gv * gv + 2.0 * f * gv * gp - (1.0 - c) * gp;
    }
};

double norm_im(cplx v)
{
    double a = std::abs(v);
    return a > 0.0 ? v.imag() / a : 0.0;
}

} // namespace

double x_G(double m, const power_profile& p, double c0)
{
    check_pole(m, p);
    return x_G_raw(m, p, power_weights(p, c0));
}

double x_G_prime(double m, const power_profile& p, double c0)
{
    check_pole(m, p);
    return x_G_prime_raw(m, p, power_weights(p, c0));
}

double x_G_second(double m, const power_profile& p, double c0)
{
    check_pole(m, p);
    std::vector<double> w = power_weights(p, c0);
    double s = -2.0 / (m * m * m);
    for (int k = 0; k < p.K(); ++k) {
        double P = p.powers()[k];
        double d = 1.0 + P * m;
        s += 2.0 * w[k] * P * P * P / (d * d * d);
    }
    return s;
}

double inflexion_sum(double m, const power_profile& p, double c0)
{
    return power_sum(m, p, power_weights(p, c0), 3);
}

g_support support_G(const power_profile& p, double c0)
{
    g_support gs;
    if (p.empty()) return gs;
    if (!(c0 > 1.0)) {
        gs.merged_at_zero = true;
        return gs;
    }
    gs.zero_mass = (c0 - 1.0) / c0;
    const int K = p.K();
    std::vector<double> w = power_weights(p, c0);
    std::vector<double> q(K);
    for (int i = 0; i < K; ++i) q[i] = -1.0 / p.powers()[i];

    auto infl = [&](double m) { return power_sum(m, p, w, 3) - 1.0; };
    auto xgp = [&](double m) { return x_G_prime_raw(m, p, w); };

    // Inflexion roots: the left side rises from 1/c0 (at -inf) or -inf (at a
    // pole) to +inf on each interval.
    {
        double s = std::abs(q[0]);
        double lo = q[0] - s;
        int guard = 0;
        while (infl(lo) >= 0.0) {
            s *= 2.0;
            lo = q[0] - s;
            if (++guard > 2000) throw numerical_error("support_G: no bracket for the first inflexion root");
        }
        gs.inflexion_roots.push_back(detail::bisect(infl, lo, q[0], -1));
    }
    for (int i = 1; i < K; ++i) gs.inflexion_roots.push_back(detail::bisect(infl, q[i - 1], q[i], -1));

    // x_G' peaks at the inflexion root of each pole interval, so boundary
    // roots exist there iff that peak is positive.
    std::vector<bool> rises(K);
    for (int i = 0; i < K; ++i) rises[i] = xgp(gs.inflexion_roots[i]) > 0.0;
    if (!rises[0]) {
        std::ostringstream os;
        os << "support_G: x_G' not positive at the first inflexion root on (-inf, " << q[0] << ")";
        throw numerical_error(os.str());
    }

    std::vector<double> lefts, rights;
    lefts.push_back(detail::bisect(xgp, gs.inflexion_roots[0], q[0], +1));
    for (int i = 1; i < K; ++i) {
        if (!rises[i]) continue;
        rights.push_back(detail::bisect(xgp, q[i - 1], gs.inflexion_roots[i], -1));
        lefts.push_back(detail::bisect(xgp, gs.inflexion_roots[i], q[i], +1));
    }
    rights.push_back(detail::bisect(xgp, q[K - 1], 0.0, -1));

    gs.power_to_cluster.resize(K);
    int cl = 0;
    for (int k = 0; k < K; ++k) {
        if (rises[k]) ++cl;
        gs.power_to_cluster[k] = cl;
    }
    for (std::size_t i = 0; i < lefts.size(); ++i) {
        g_cluster c;
        c.m_lo = lefts[i];
        c.m_hi = rights[i];
        c.x_lo = x_G_raw(c.m_lo, p, w);
        c.x_hi = x_G_raw(c.m_hi, p, w);
        gs.clusters.push_back(c);
    }
    for (int k = 0; k < K; ++k) gs.clusters[gs.power_to_cluster[k] - 1].mass += w[k];
    return gs;
}

assumption1_result check_assumption1(int k, const power_profile& p, double c0)
{
    if (k < 1 || k > p.K()) throw contract_error("check_assumption1: power index out of range");
    assumption1_result res;
    if (!(c0 > 1.0)) {
        res.note = "inseparable: c0 <= 1 for P_1";
        return res;
    }
    g_support gs = support_G(p, c0);
    std::vector<double> w = power_weights(p, c0);
    res.m_left = gs.inflexion_roots[k - 1];
    res.m_right = k < p.K() ? gs.inflexion_roots[k] : 0.0;
    res.lhs_left = power_sum(res.m_left, p, w, 2);
    res.lhs_right = power_sum(res.m_right, p, w, 2);
    res.ok = res.lhs_left < 1.0 && res.lhs_right < 1.0;
    return res;
}

namespace {

assumption2_result assumption2_from(int k, const g_support& gs, const f_side& fs, double c)
{
    assumption2_result res;
    int kg = gs.power_to_cluster[k - 1];
    int KG = gs.K_G();
    res.k_G = kg;
    res.m_left = fs.roots[kg - 1];
    res.m_right = fs.roots[kg];
    res.lhs_left = fs.measures[kg - 1].sum(res.m_left, 2);
    res.lhs_right = kg < KG ? fs.measures[kg].sum(res.m_right, 2) : 0.0;
    res.ok = res.lhs_left < c && res.lhs_right < c;
    res.x_left = fs.measures[kg - 1].bound(res.m_left, c);
    res.x_right = kg < KG ? fs.measures[kg].bound(res.m_right, c) : fs.measures[KG].bound(fs.m_edge, c);
    return res;
}

} // namespace

assumption2_result check_assumption2(int k, const power_profile& p, ratios r, noise_level noise)
{
    if (k < 1 || k > p.K()) throw contract_error("check_assumption2: power index out of range");
    if (!(r.c0 > 1.0)) {
        assumption2_result res;
        res.note = "inseparable: c0 <= 1 for P_1";
        return res;
    }
    if (!(noise.sigma2 > 0.0)) throw contract_error("check_assumption2: requires sigma2 > 0");
    if (!check_assumption1(k, p, r.c0).ok)
        throw contract_error("check_assumption2: Assumption 1 does not hold for this power");
    g_support gs = support_G(p, r.c0);
    f_side fs = solve_f_side(gs, r.c, noise.sigma2);
    return assumption2_from(k, gs, fs, r.c);
}

separability_report separability(const power_profile& p, ratios r, noise_level noise)
{
    separability_report rep;
    const int K = p.K();
    rep.assumption1_ok.assign(K, false);
    rep.assumption2_ok.assign(K, false);
    rep.separable.assign(K, false);
    if (K == 0) return rep;
    if (!(r.c0 > 1.0)) {
        rep.note = "inseparable: c0 <= 1 for P_1";
        return rep;
    }
    g_support gs = support_G(p, r.c0);
    for (int k = 1; k <= K; ++k) rep.assumption1_ok[k - 1] = check_assumption1(k, p, r.c0).ok;
    if (!(noise.sigma2 > 0.0)) {
        rep.note = "sigma2 = 0: Assumption 2 not evaluated";
        return rep;
    }
    f_side fs = solve_f_side(gs, r.c, noise.sigma2);
    rep.m_F_roots = fs.roots;
    for (int j = 1; j <= gs.K_G(); ++j) {
        double xl = fs.measures[j - 1].bound(fs.roots[j - 1], r.c);
        double xr = j < gs.K_G() ? fs.measures[j].bound(fs.roots[j], r.c)
                                 : fs.measures[j].bound(fs.m_edge, r.c);
        rep.f_edges.push_back({xl, xr});
    }
    for (int k = 1; k <= K; ++k) {
        if (!rep.assumption1_ok[k - 1]) continue;
        rep.assumption2_ok[k - 1] = assumption2_from(k, gs, fs, r.c).ok;
        rep.separable[k - 1] = rep.assumption2_ok[k - 1];
    }
    return rep;
}

namespace {

template <class Pred>
double geometric_bisect(Pred&& passes, double lo, double hi)
{
    // passes(lo) false, passes(hi) true
    for (int it = 0; it < 200 && hi / lo - 1.0 > 1e-12; ++it) {
        double mid = std::sqrt(lo * hi);
        if (passes(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

} // namespace

std::optional<double> critical_c0(const power_profile& p, double c0_max)
{
    if (p.K() < 2) throw contract_error("critical_c0: needs at least two powers");
    auto passes = [&](double c0) {
        if (!(c0 > 1.0)) return false;
        for (int k = 1; k <= p.K(); ++k)
            if (!check_assumption1(k, p, c0).ok) return false;
        return true;
    };
    if (!passes(c0_max)) return std::nullopt;
    return geometric_bisect(passes, 1.0, c0_max);
}

std::optional<double> critical_c(const power_profile& p, double c0, noise_level noise, double c_max)
{
    for (int k = 1; k <= p.K(); ++k)
        if (!check_assumption1(k, p, c0).ok)
            throw contract_error("critical_c: Assumption 1 fails at this c0");
    if (!(noise.sigma2 > 0.0)) throw contract_error("critical_c: requires sigma2 > 0");
    g_support gs = support_G(p, c0);
    auto passes = [&](double c) {
        f_side fs = solve_f_side(gs, c, noise.sigma2);
        for (int k = 1; k <= p.K(); ++k)
            if (!assumption2_from(k, gs, fs, c).ok) return false;
        return true;
    };
    const double c_lo = 1e-3;
    if (passes(c_lo)) return c_lo;
    if (!passes(c_max)) return std::nullopt;
    return geometric_bisect(passes, c_lo, c_max);
}

namespace {

// Shared by solve_m_F and the real-axis support test. z may be real here.
stieltjes_point solve_core(cplx z, const power_profile& p, ratios r, noise_level noise,
                           const solver_options& opt)
{
    const int K = p.K();
    const double c = r.c, s2 = noise.sigma2;
    std::vector<double> P = p.powers();
    std::vector<double> a(K);
    if (K > 0) {
        std::vector<double> w = power_weights(p, r.c0);
        for (int k = 0; k < K; ++k) a[k] = P[k] * w[k];
    }

    // Pi(f) = prod (1 + P_k f); Nf(f) = f Pi(f) g(f).
    poly Pi{cplx(1.0)};
    for (int k = 0; k < K; ++k) Pi = pmul(Pi, poly{cplx(1.0), cplx(P[k])});
    poly Nf = Pi;
    padd(Nf, shift_up(Pi), -s2);
    for (int k = 0; k < K; ++k) {
        poly others{cplx(1.0)};
        for (int j = 0; j < K; ++j)
            if (j != k) others = pmul(others, poly{cplx(1.0), cplx(P[j])});
        padd(Nf, shift_up(others), -a[k]);
    }
    poly E = pmul(Nf, Nf);
    padd(E, pmul(Nf, Pi), -(1.0 - c));
    padd(E, shift_up(pmul(Pi, Pi)), c * z);

    g_eval<cplx> ge{P, a, s2};
    stieltjes_point best;
    double best_score = -std::numeric_limits<double>::infinity();
    bool found = false;
    double lowest_residual = std::numeric_limits<double>::infinity();
    for (cplx f : poly_roots(E)) {
        int iters = 0;
        for (; iters < opt.max_newton; ++iters) {
            cplx R, dR;
            ge.residual(f, c, z, R, dR);
            if (!std::isfinite(std::abs(R)) || dR == cplx(0.0)) break;
            cplx step = R / dR;
            f -= step;
            if (std::abs(step) <= 1e-15 * std::abs(f)) {
                ++iters;
                break;
            }
        }
        cplx gv = ge.g(f);
        if (!std::isfinite(std::abs(gv)) || gv == cplx(0.0)) continue;
        cplx m = 1.0 / gv;
        cplx mF = c * m + (c - 1.0) / z;
        if (!std::isfinite(std::abs(mF))) continue;
        // Scaled residual of f g^2 - (1-c) g + c z = 0. Measuring it in m
        // instead cancels terms of size |m|^2 |z| when m ~ 1/z near 0.
        double denom = std::abs(f * gv * gv) + std::abs((1.0 - c) * gv) + std::abs(c * z);
        double res = std::abs(f * gv * gv - (1.0 - c) * gv + c * z) / denom;
        // Roots of the expanded polynomial near clustered poles can be
        // spurious; only polished roots compete on the branch score.
        if (!(res <= opt.accept_residual)) {
            if (!found) lowest_residual = std::min(lowest_residual, res);
            continue;
        }
        double score = std::min({norm_im(m), norm_im(f), norm_im(mF)});
        if (score > best_score) {
            best_score = score;
            best.z = z;
            best.m_uF = m;
            best.m_F = mF;
            best.f = f;
            best.iterations = iters;
            best.residual = res;
            found = true;
        }
    }
    if (!found) {
        std::ostringstream os;
        os << "solve_m_F: no admissible root at z = " << z << " (best residual " << lowest_residual << ")";
        throw numerical_error(os.str());
    }
    return best;
}

} // namespace

stieltjes_point solve_m_F(cplx z, const power_profile& p, ratios r, noise_level noise,
                          const solver_options& opt)
{
    if (!(z.imag() > 0.0)) throw contract_error("solve_m_F: Im(z) must be > 0");
    return solve_core(z, p, r, noise, opt);
}

double limit_density(double x, const power_profile& p, ratios r, noise_level noise)
{
    stieltjes_point sp = solve_core(cplx(x, 0.0), p, r, noise, solver_options{});
    return std::max(0.0, sp.m_F.imag()) / pi;
}

std::vector<double> m_F_negative_axis(const std::vector<double>& xs, const power_profile& p,
                                      ratios r, noise_level noise)
{
    const int K = p.K();
    const double c = r.c, s2 = noise.sigma2;
    std::vector<double> P = p.powers();
    std::vector<double> a(K);
    if (K > 0) {
        std::vector<double> w = power_weights(p, r.c0);
        for (int k = 0; k < K; ++k) a[k] = P[k] * w[k];
    }
    g_eval<double> ge{P, a, s2};

    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return xs[i] < xs[j]; });
    for (double x : xs)
        if (!(x < 0.0)) throw contract_error("m_F_negative_axis: points must be < 0");

    // Newton from a nearby solution; accepted only if the result is a
    // Stieltjes value of a measure on [0, inf).
    auto newton = [&](double x, double f0, double& f_out, double& mF_out) {
        double f = f0;
        bool conv = false;
        for (int it = 0; it < 60; ++it) {
            double R, dR;
            ge.residual(f, c, x, R, dR);
            if (!std::isfinite(R) || dR == 0.0) return false;
            double step = R / dR;
            f -= step;
            if (std::abs(step) <= 1e-14 * std::abs(f)) {
                conv = true;
                break;
            }
        }
        if (!conv || !(f > 0.0)) return false;
        double m = 1.0 / ge.g(f);
        double mF = c * m + (c - 1.0) / x;
        if (!(m > 0.0) || !(mF > 0.0) || mF > (1.0 + 1e-9) / -x) return false;
        f_out = f;
        mF_out = mF;
        return true;
    };

    std::vector<double> out(xs.size());
    if (xs.empty()) return out;
    double x = std::min(-1e4 * (1.0 + support_scale(p, r, noise)), 2.0 * xs[order[0]]);
    double m0 = -1.0 / x;
    double f = 1.0 / (1.0 / m0 + s2);
    double mF = 0.0;
    if (!newton(x, f, f, mF)) throw numerical_error("m_F_negative_axis: start point failed to converge");

    for (std::size_t idx : order) {
        double target = xs[idx];
        int halvings = 0;
        while (x < target) {
            double next = std::min(x * 0.5, target);
            if (x * 0.5 >= target) next = target;
            double f_new, mF_new;
            while (!newton(next, f, f_new, mF_new)) {
                next = 0.5 * (x + next);
                if (++halvings > 200)
                    throw numerical_error("m_F_negative_axis: continuation step collapsed");
            }
            x = next;
            f = f_new;
            mF = mF_new;
        }
        out[idx] = mF;
    }
    return out;
}

double density_curve::integral() const
{
    double s = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        s += 0.5 * (density[i] + density[i - 1]) * (grid[i] - grid[i - 1]);
    return s;
}

std::vector<double> density_curve::cdf() const
{
    std::vector<double> F(grid.size(), 0.0);
    double s = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (i > 0) s += 0.5 * (density[i] + density[i - 1]) * (grid[i] - grid[i - 1]);
        F[i] = s + (grid[i] >= 0.0 ? zero_mass : 0.0);
    }
    return F;
}

double support_scale(const power_profile& p, ratios r, noise_level noise)
{
    double top = noise.sigma2;
    if (!p.empty()) {
        double g = 1.0 + 1.0 / std::sqrt(r.c0);
        top += p.powers().back() * g * g;
    }
    double f = 1.0 + 1.0 / std::sqrt(r.c);
    double s = top * f * f;
    return s > 0.0 ? s : 1.0;
}

double default_y_offset(const power_profile& p, ratios r, noise_level noise)
{
    return 1e-6 * (1.0 + support_scale(p, r, noise));
}

density_curve lsd_density(const std::vector<double>& grid, const power_profile& p, ratios r,
                          noise_level noise, double y_offset)
{
    if (grid.empty()) throw contract_error("lsd_density: empty grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw contract_error("lsd_density: grid must be ascending");
    if (!(y_offset > 0.0)) throw contract_error("lsd_density: y_offset must be > 0");

    density_curve dc;
    dc.grid = grid;
    dc.y_offset = y_offset;
    dc.zero_mass = std::max(0.0, 1.0 - r.c);
    dc.co_spectrum_zero_mass = r.c > 1.0 ? (r.c - 1.0) / r.c : 0.0;
    dc.density.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        try {
            stieltjes_point sp = solve_m_F(cplx(grid[i], y_offset), p, r, noise);
            dc.density[i] = std::max(0.0, sp.m_F.imag()) / pi;
        } catch (const numerical_error& e) {
            std::ostringstream os;
            os << "lsd_density at x = " << grid[i] << ": " << e.what();
            throw numerical_error(os.str());
        }
    }
    // Support is classified on the real axis itself: the Lorentzian tail of
    // the offset (y times the integral of dF/(t-x)^2) can exceed the floor
    // next to a cluster, while at y = 0 the density outside the support is 0.
    // The floor carries units of 1/x so the classification is scale covariant.
    const double floor = 1e-4 / support_scale(p, r, noise);
    bool in = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        bool above = dc.density[i] > floor && grid[i] != 0.0 &&
                     limit_density(grid[i], p, r, noise) > floor;
        if (above && !in) {
            dc.support_intervals.push_back({grid[i], grid[i]});
            in = true;
        } else if (above) {
            dc.support_intervals.back()[1] = grid[i];
        } else {
            in = false;
        }
    }
    return dc;
}

std::vector<double> linspace(double a, double b, int n)
{
    if (n < 1) throw contract_error("linspace: n must be >= 1");
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = a;
        return v;
    }
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

} // namespace eiginf
