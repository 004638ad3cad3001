#include "eiginf/harness.hpp"

#include "eiginf/inference.hpp"
#include "eiginf/secular.hpp"
#include "eiginf/spectra.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <tuple>
#include <sstream>
#include <thread>

namespace eiginf {

namespace {

std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v)
{
    std::vector<std::string> out;
    std::string t = trim(v);
    if (t.empty()) return out;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

double parse_double(const std::string& key, const std::string& v)
{
    std::string t = trim(v);
    if (t == "inf") return INFINITY;
    double out = 0.0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty())
        throw config_error("config: key '" + key + "' expects a number, got '" + v + "'");
    return out;
}

long long parse_int(const std::string& key, const std::string& v)
{
    std::string t = trim(v);
    long long out = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty())
        throw config_error("config: key '" + key + "' expects an integer, got '" + v + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& v)
{
    std::string t = trim(v);
    if (t == "true" || t == "1") return true;
    if (t == "false" || t == "0") return false;
    throw config_error("config: key '" + key + "' expects true or false, got '" + v + "'");
}

template <class T, class F>
std::string join(const std::vector<T>& v, F&& fmt)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += fmt(v[i]);
    }
    return s;
}

// Runs fn(t) for t in [0, T) on up to `threads` workers; results land at
// their trial index so the output never depends on scheduling.
template <class R>
std::vector<R> for_trials(int T, int threads, const std::function<R(int)>& fn)
{
    std::vector<R> out(T);
    int W = std::max(1, std::min(threads, T));
    if (W == 1) {
        for (int t = 0; t < T; ++t) out[t] = fn(t);
        return out;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(W);
    for (int w = 0; w < W; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int t = w; t < T; t += W) out[t] = fn(t);
            } catch (...) {
                errs[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    return out;
}

using estimate_row = std::optional<std::vector<double>>;

std::vector<estimate_row> run_estimators(const eigen_sample& s, const scenario_spec& spec,
                                         const std::vector<std::string>& names)
{
    std::vector<estimate_row> out;
    const std::vector<int>& mults = spec.profile.multiplicities();
    for (const auto& name : names) {
        try {
            estimate_set e;
            switch (estimator_from_string(name)) {
            case estimator_kind::stieltjes: e = estimate_stieltjes(s, mults); break;
            case estimator_kind::classical: e = estimate_classical(s, mults); break;
            case estimator_kind::moment: e = estimate_moment(s, mults, spec.noise); break;
            }
            bool finite = std::all_of(e.estimates.begin(), e.estimates.end(),
                                      [](double v) { return std::isfinite(v); });
            out.push_back(finite ? estimate_row(e.estimates) : std::nullopt);
        } catch (const config_error&) {
            throw;
        } catch (const error&) {
            out.push_back(std::nullopt);
        }
    }
    return out;
}

} // namespace

std::string format_double(double v)
{
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void set_config_value(experiment_config& c, const std::string& key, const std::string& value)
{
    const std::string v = trim(value);
    auto dlist = [&] {
        std::vector<double> r;
        for (auto& s : split_list(v)) r.push_back(parse_double(key, s));
        return r;
    };
    if (key == "scenario") c.scenario = v;
    else if (key == "scenario_n") c.scenario_n = static_cast<int>(parse_int(key, v));
    else if (key == "powers") c.powers = dlist();
    else if (key == "mults") {
        c.mults.clear();
        for (auto& s : split_list(v)) c.mults.push_back(static_cast<int>(parse_int(key, s)));
    }
    else if (key == "N") c.N = static_cast<int>(parse_int(key, v));
    else if (key == "M") c.M = static_cast<int>(parse_int(key, v));
    else if (key == "sigma2") c.sigma2 = v.empty() ? std::nullopt : std::optional<double>(parse_double(key, v));
    else if (key == "constellation") c.constellation = v;
    else if (key == "estimators") c.estimators = split_list(v);
    else if (key == "snr_db") c.snr_db = dlist();
    else if (key == "trials") c.trials = static_cast<int>(parse_int(key, v));
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_int(key, v));
    else if (key == "threads") c.threads = static_cast<int>(parse_int(key, v));
    else if (key == "out") c.out = v;
    else if (key == "dump") c.dump = v;
    else if (key == "grid_lo") c.grid_lo = parse_double(key, v);
    else if (key == "grid_hi") c.grid_hi = parse_double(key, v);
    else if (key == "grid_points") c.grid_points = static_cast<int>(parse_int(key, v));
    else if (key == "y_offset") c.y_offset = parse_double(key, v);
    else if (key == "histogram") c.histogram = parse_bool(key, v);
    else if (key == "hist_bins") c.hist_bins = static_cast<int>(parse_int(key, v));
    else if (key == "sweep") c.sweep = v;
    else if (key == "sweep_values") c.sweep_values = dlist();
    else if (key == "c0") c.c0 = parse_double(key, v);
    else if (key == "k_max") c.k_max = static_cast<int>(parse_int(key, v));
    else if (key == "even_sizes") c.even_sizes = parse_bool(key, v);
    else if (key == "tau") c.tau = parse_double(key, v);
    else if (key == "blind_sigma2") c.blind_sigma2 = parse_bool(key, v);
    else throw config_error("config: unknown key '" + key + "'");
}

experiment_config parse_config(const std::string& text)
{
    experiment_config cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config: line " + std::to_string(lineno) + " has no '='");
        set_config_value(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    validate_config(cfg);
    return cfg;
}

experiment_config load_config(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw config_error("config: cannot open " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const experiment_config& c)
{
    auto d = [](double v) { return format_double(v); };
    auto i = [](int v) { return std::to_string(v); };
    auto s = [](const std::string& v) { return v; };
    auto b = [](bool v) { return std::string(v ? "true" : "false"); };
    std::ostringstream os;
    os << "scenario = " << c.scenario << "\n";
    os << "scenario_n = " << c.scenario_n << "\n";
    os << "powers = " << join(c.powers, d) << "\n";
    os << "mults = " << join(c.mults, i) << "\n";
    os << "N = " << c.N << "\n";
    os << "M = " << c.M << "\n";
    os << "sigma2 = " << (c.sigma2 ? format_double(*c.sigma2) : "") << "\n";
    os << "constellation = " << c.constellation << "\n";
    os << "estimators = " << join(c.estimators, s) << "\n";
    os << "snr_db = " << join(c.snr_db, d) << "\n";
    os << "trials = " << c.trials << "\n";
    os << "seed = " << c.seed << "\n";
    os << "threads = " << c.threads << "\n";
    os << "out = " << c.out << "\n";
    os << "dump = " << c.dump << "\n";
    os << "grid_lo = " << d(c.grid_lo) << "\n";
    os << "grid_hi = " << d(c.grid_hi) << "\n";
    os << "grid_points = " << c.grid_points << "\n";
    os << "y_offset = " << d(c.y_offset) << "\n";
    os << "histogram = " << b(c.histogram) << "\n";
    os << "hist_bins = " << c.hist_bins << "\n";
    os << "sweep = " << c.sweep << "\n";
    os << "sweep_values = " << join(c.sweep_values, d) << "\n";
    os << "c0 = " << d(c.c0) << "\n";
    os << "k_max = " << c.k_max << "\n";
    os << "even_sizes = " << b(c.even_sizes) << "\n";
    os << "tau = " << d(c.tau) << "\n";
    os << "blind_sigma2 = " << b(c.blind_sigma2) << "\n";
    return os.str();
}

void validate_config(const experiment_config& c)
{
    static const char* scen[] = {"a", "b", "custom", "noise"};
    if (std::find(std::begin(scen), std::end(scen), c.scenario) == std::end(scen))
        throw config_error("config: scenario must be a, b, custom or noise");
    if (c.trials < 1) throw config_error("config: trials must be >= 1");
    if (c.snr_db.empty() && !c.sigma2) throw config_error("config: snr_db must not be empty");
    if (c.threads < 1) throw config_error("config: threads must be >= 1");
    if (c.grid_points < 2) throw config_error("config: grid_points must be >= 2");
    if (c.hist_bins < 1) throw config_error("config: hist_bins must be >= 1");
    if (c.k_max < 1) throw config_error("config: k_max must be >= 1");
    if (c.constellation != "qpsk" && c.constellation != "gaussian")
        throw config_error("config: constellation must be qpsk or gaussian");
    if (c.sweep != "sigma2" && c.sweep != "ratio") throw config_error("config: sweep must be sigma2 or ratio");
    if (c.powers.size() != c.mults.size())
        throw config_error("config: powers and mults must have the same length");
    for (const auto& e : c.estimators) estimator_from_string(e);
    if (c.sigma2 && !(*c.sigma2 >= 0.0)) throw config_error("config: sigma2 must be >= 0");
}

scenario_spec resolve_spec(const experiment_config& c, double snr_db)
{
    scenario_spec s;
    try {
        if (c.scenario == "a") {
            s = scenario_a(c.scenario_n, snr_db, c.seed);
        } else if (c.scenario == "b") {
            s = scenario_b(snr_db, c.seed);
        } else if (c.scenario == "custom") {
            if (c.powers.empty() || c.N < 1 || c.M < 1)
                throw config_error("config: scenario custom needs powers, mults, N and M");
        } else {
            if (c.N < 1 || c.M < 1) throw config_error("config: scenario noise needs N and M");
            if (!c.powers.empty()) throw config_error("config: scenario noise takes no powers");
        }
        if (!c.powers.empty()) s.profile = power_profile(c.powers, c.mults);
        int N = c.N > 0 ? c.N : s.shape.N;
        int M = c.M > 0 ? c.M : s.shape.M;
        int n = s.profile.empty() ? N : s.profile.n();
        s.shape = system_shape(N, M, n);
        s.noise = noise_level(c.sigma2 ? *c.sigma2 : snr_to_sigma2(snr_db));
        s.signal = c.constellation == "gaussian" ? constellation::gaussian : constellation::qpsk;
        s.seed = c.seed;
    } catch (const contract_error& e) {
        throw config_error(std::string("config: ") + e.what());
    }
    if (!s.profile.empty() && s.profile.n() > s.shape.N) throw config_error("config: n exceeds N");
    return s;
}

namespace {

double first_snr(const experiment_config& c)
{
    return c.snr_db.empty() ? 0.0 : c.snr_db.front();
}

ratios spec_ratios(const scenario_spec& s)
{
    return s.profile.empty() ? ratios{1.0, s.shape.c()} : s.shape.ratios();
}

} // namespace

density_result run_density(const experiment_config& c)
{
    scenario_spec s = resolve_spec(c, first_snr(c));
    ratios r = spec_ratios(s);
    double hi = c.grid_hi > 0.0 ? c.grid_hi : 1.1 * support_scale(s.profile, r, s.noise);
    if (!(hi > c.grid_lo)) throw config_error("config: grid_hi must exceed grid_lo");
    std::vector<double> grid = linspace(c.grid_lo, hi, c.grid_points);
    double y = c.y_offset > 0.0 ? c.y_offset : default_y_offset(s.profile, r, s.noise);
    density_curve dc = lsd_density(grid, s.profile, r, s.noise, y);

    std::vector<double> hist;
    if (c.histogram) {
        sample_draw d = draw(s, 0);
        hist.assign(c.hist_bins, 0.0);
        double w = (hi - c.grid_lo) / c.hist_bins;
        for (double l : d.eigenvalues) {
            int b = static_cast<int>(std::floor((l - c.grid_lo) / w));
            if (b >= 0 && b < c.hist_bins) hist[b] += 1.0;
        }
        for (double& h : hist) h /= (s.shape.N * w);
    }

    density_result out;
    std::ostringstream os;
    os << (c.histogram ? "x,density,empirical\n" : "x,density\n");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        os << format_double(grid[i]) << "," << format_double(dc.density[i]);
        if (c.histogram) {
            double w = (hi - c.grid_lo) / c.hist_bins;
            int b = std::min(c.hist_bins - 1, static_cast<int>(std::floor((grid[i] - c.grid_lo) / w)));
            os << "," << format_double(hist[b]);
        }
        os << "\n";
    }
    out.csv = os.str();
    std::ostringstream ss;
    ss << "interval,lo,hi\n";
    for (std::size_t i = 0; i < dc.support_intervals.size(); ++i)
        ss << i + 1 << "," << format_double(dc.support_intervals[i][0]) << ","
           << format_double(dc.support_intervals[i][1]) << "\n";
    out.support_csv = ss.str();
    out.support = dc.support_intervals;
    return out;
}

std::string run_support(const experiment_config& c)
{
    scenario_spec s = resolve_spec(c, first_snr(c));
    density_result d = run_density(c);
    std::ostringstream os;
    os << "kind,index,lo,hi,assumption1_ok,assumption2_ok,separable\n";
    for (std::size_t i = 0; i < d.support.size(); ++i)
        os << "f_support," << i + 1 << "," << format_double(d.support[i][0]) << ","
           << format_double(d.support[i][1]) << ",,,\n";
    if (!s.profile.empty()) {
        ratios r = s.shape.ratios();
        g_support gs = support_G(s.profile, r.c0);
        for (int i = 0; i < gs.K_G(); ++i)
            os << "g_cluster," << i + 1 << "," << format_double(gs.clusters[i].x_lo) << ","
               << format_double(gs.clusters[i].x_hi) << ",,,\n";
        separability_report rep = separability(s.profile, r, s.noise);
        for (std::size_t i = 0; i < rep.f_edges.size(); ++i)
            os << "f_edge," << i + 1 << "," << format_double(rep.f_edges[i][0]) << ","
               << format_double(rep.f_edges[i][1]) << ",,,\n";
        for (int k = 0; k < s.profile.K(); ++k)
            os << "power," << k + 1 << ",,," << int(rep.assumption1_ok[k]) << ","
               << int(rep.assumption2_ok[k]) << "," << int(rep.separable[k]) << "\n";
    }
    return os.str();
}

std::string run_separability(const experiment_config& c)
{
    std::ostringstream os;
    if (c.sweep == "ratio") {
        os << "p1_over_p2,critical_c0\n";
        for (double v : c.sweep_values) {
            if (!(v > 0.0 && v < 1.0)) throw config_error("config: ratio sweep values must lie in (0, 1)");
            auto cc = critical_c0(power_profile({v, 1.0}, {1, 1}));
            os << format_double(v) << "," << format_double(cc ? *cc : INFINITY) << "\n";
        }
        return os.str();
    }
    scenario_spec s = resolve_spec(c, first_snr(c));
    if (s.profile.empty()) throw config_error("config: sigma2 sweep needs a power profile");
    double c0 = c.c0 > 0.0 ? c.c0 : s.shape.c0();
    os << "sigma2,critical_c\n";
    for (double v : c.sweep_values) {
        auto cc = critical_c(s.profile, c0, noise_level(v));
        os << format_double(v) << "," << format_double(cc ? *cc : INFINITY) << "\n";
    }
    return os.str();
}

std::string run_estimate(const experiment_config& c, const std::vector<double>* eigenvalues)
{
    scenario_spec s = resolve_spec(c, first_snr(c));
    std::vector<double> lam = eigenvalues ? *eigenvalues : draw(s, 0).eigenvalues;
    if (eigenvalues && static_cast<int>(lam.size()) != s.shape.N)
        throw config_error("estimate: eigenvalue count differs from N");
    eigen_sample es = make_eigen_sample(lam, s.shape.M);
    std::ostringstream os;
    os << "estimator,k,estimate,sigma2_hat,complex_roots\n";
    const auto& mults = s.profile.multiplicities();
    for (const auto& name : c.estimators) {
        estimate_set e;
        switch (estimator_from_string(name)) {
        case estimator_kind::stieltjes: e = estimate_stieltjes(es, mults); break;
        case estimator_kind::classical: e = estimate_classical(es, mults); break;
        case estimator_kind::moment: e = estimate_moment(es, mults, s.noise); break;
        }
        for (std::size_t k = 0; k < e.estimates.size(); ++k)
            os << name << "," << k + 1 << "," << format_double(e.estimates[k]) << ","
               << (e.sigma2_hat ? format_double(*e.sigma2_hat) : "") << ","
               << int(e.complex_roots_encountered) << "\n";
    }
    return os.str();
}

std::vector<nmse_record> nmse_from_dump(const std::vector<trial_estimate>& rows, const power_profile& truth)
{
    // key: (snr, estimator, k), ordered by first appearance
    std::vector<nmse_record> out;
    std::map<std::tuple<double, std::string, int>, std::size_t> index;
    std::vector<double> sum_sq, sum;
    for (const auto& r : rows) {
        auto key = std::make_tuple(r.snr_db, r.estimator, r.k);
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, out.size()).first;
            nmse_record rec;
            rec.snr_db = r.snr_db;
            rec.estimator = r.estimator;
            rec.k = r.k;
            rec.power = truth.powers()[r.k - 1];
            out.push_back(rec);
            sum_sq.push_back(0.0);
            sum.push_back(0.0);
        }
        std::size_t i = it->second;
        double P = out[i].power, e = (r.estimate - P) / P;
        sum_sq[i] += e * e;
        sum[i] += r.estimate;
        out[i].trials += 1;
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].nmse = sum_sq[i] / out[i].trials;
        out[i].mean_estimate = sum[i] / out[i].trials;
    }
    return out;
}

nmse_result run_nmse(const experiment_config& c)
{
    nmse_result res;
    const int T = c.trials;
    const std::size_t E = c.estimators.size();
    for (double snr : c.snr_db) {
        scenario_spec s = resolve_spec(c, snr);
        if (s.profile.empty()) throw config_error("config: nmse needs a power profile");
        auto per_trial = for_trials<std::vector<estimate_row>>(T, c.threads, [&](int t) {
            sample_draw d = draw(s, static_cast<std::uint64_t>(t));
            eigen_sample es = make_eigen_sample(d.eigenvalues, s.shape.M);
            return run_estimators(es, s, c.estimators);
        });
        const int K = s.profile.K();
        for (std::size_t e = 0; e < E; ++e) {
            int excluded = 0;
            std::vector<trial_estimate> rows;
            for (int t = 0; t < T; ++t) {
                const estimate_row& row = per_trial[t][e];
                if (!row) {
                    ++excluded;
                    continue;
                }
                for (int k = 0; k < K; ++k) rows.push_back({snr, t, c.estimators[e], k + 1, (*row)[k]});
            }
            std::vector<nmse_record> recs = nmse_from_dump(rows, s.profile);
            if (recs.empty()) {
                for (int k = 0; k < K; ++k) {
                    nmse_record r;
                    r.snr_db = snr;
                    r.estimator = c.estimators[e];
                    r.k = k + 1;
                    r.power = s.profile.powers()[k];
                    r.nmse = NAN;
                    r.mean_estimate = NAN;
                    recs.push_back(r);
                }
            }
            for (auto& r : recs) r.excluded = excluded;
            res.records.insert(res.records.end(), recs.begin(), recs.end());
            res.per_trial.insert(res.per_trial.end(), rows.begin(), rows.end());
        }
    }
    std::ostringstream os;
    os << "snr_db,estimator,k,power,nmse,mean_estimate,trials,excluded\n";
    for (const auto& r : res.records)
        os << format_double(r.snr_db) << "," << r.estimator << "," << r.k << "," << format_double(r.power) << ","
           << format_double(r.nmse) << "," << format_double(r.mean_estimate) << "," << r.trials << ","
           << r.excluded << "\n";
    res.csv = os.str();
    std::ostringstream ds;
    ds << "snr_db,trial,estimator,k,estimate\n";
    for (const auto& r : res.per_trial)
        ds << format_double(r.snr_db) << "," << r.trial << "," << r.estimator << "," << r.k << ","
           << format_double(r.estimate) << "\n";
    res.dump_csv = ds.str();
    return res;
}

std::string run_estimator_cdf(const experiment_config& c)
{
    experiment_config one = c;
    one.snr_db = {first_snr(c)};
    nmse_result r = run_nmse(one);
    std::map<std::pair<std::string, int>, std::vector<double>> groups;
    for (const auto& t : r.per_trial) groups[{t.estimator, t.k}].push_back(t.estimate);
    std::ostringstream os;
    os << "estimator,k,rank,estimate,cdf\n";
    for (const auto& name : c.estimators) {
        for (auto& [key, vals] : groups) {
            if (key.first != name) continue;
            std::sort(vals.begin(), vals.end());
            for (std::size_t i = 0; i < vals.size(); ++i)
                os << name << "," << key.second << "," << i + 1 << "," << format_double(vals[i]) << ","
                   << format_double(static_cast<double>(i + 1) / vals.size()) << "\n";
        }
    }
    return os.str();
}

rci_result run_rci(const experiment_config& c)
{
    rci_result res;
    inference_options opt;
    opt.constraints.even_sizes = c.even_sizes;
    opt.constraints.tau = c.tau;
    opt.blind_sigma2 = c.blind_sigma2;
    for (double snr : c.snr_db) {
        scenario_spec s = resolve_spec(c, snr);
        if (s.profile.empty()) throw config_error("config: rci needs a power profile");
        const std::vector<int>& truth = s.profile.multiplicities();
        auto outcome = for_trials<int>(c.trials, c.threads, [&](int t) {
            sample_draw d = draw(s, static_cast<std::uint64_t>(t));
            eigen_sample es = make_eigen_sample(d.eigenvalues, s.shape.M);
            try {
                inference_result ir = infer_joint(es, s.profile.n(), c.k_max, s.noise, opt);
                return ir.best.n_hats == truth ? 1 : 0;
            } catch (const numerical_error&) {
                return -1;
            }
        });
        rci_row row;
        row.snr_db = snr;
        row.trials = c.trials;
        int good = 0;
        for (int o : outcome) {
            if (o < 0) ++row.excluded;
            if (o > 0) ++good;
        }
        int used = row.trials - row.excluded;
        row.rci = used > 0 ? static_cast<double>(good) / used : NAN;
        res.rows.push_back(row);
    }
    std::ostringstream os;
    os << "snr_db,rci,trials,excluded\n";
    for (const auto& r : res.rows)
        os << format_double(r.snr_db) << "," << format_double(r.rci) << "," << r.trials << "," << r.excluded << "\n";
    res.csv = os.str();
    return res;
}

} // namespace eiginf
