#include "eiginf/inference.hpp"
#include "eiginf/model.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace eiginf;

namespace {

eigen_sample sample_of(const scenario_spec& s, int trial)
{
    return make_eigen_sample(draw(s, trial).eigenvalues, s.shape.M);
}

std::vector<double> top(const eigen_sample& s, int n)
{
    return std::vector<double>(s.lambdas.end() - n, s.lambdas.end());
}

} // namespace

TEST_CASE("hypothesis counts")
{
    std::vector<double> six{1, 2, 3, 4, 5, 6};
    // compositions of 6 into 1..3 parts: 1 + 5 + 10
    CHECK(enumerate_hypotheses(six, 3).size() == 16);
    std::vector<double> twelve(12);
    for (int i = 0; i < 12; ++i) twelve[i] = i + 1;
    hypothesis_constraints even;
    even.even_sizes = true;
    CHECK(enumerate_hypotheses(twelve, 3, even).size() == 16);
    CHECK(enumerate_hypotheses({1.0, 2.0}, 1).size() == 1);

    auto all = enumerate_hypotheses(six, 3);
    std::set<std::vector<int>> uniq(all.begin(), all.end());
    CHECK(uniq.size() == all.size());
    for (const auto& h : all) {
        int s = 0;
        for (int v : h) {
            CHECK(v >= 1);
            s += v;
        }
        CHECK(s == 6);
    }
    CHECK_THROWS_AS(enumerate_hypotheses(six, 0), contract_error);
}

TEST_CASE("gap threshold prunes splits inside tight groups")
{
    std::vector<double> v{1.0, 1.01, 1.02, 5.0, 5.01, 9.0};
    hypothesis_constraints c;
    c.tau = 2.5;
    auto h = enumerate_hypotheses(v, 3, c);
    CHECK(std::find(h.begin(), h.end(), std::vector<int>{3, 2, 1}) != h.end());
    CHECK(std::find(h.begin(), h.end(), std::vector<int>{1, 2, 3}) == h.end());
}

TEST_CASE("true partition scores better than a wrong one")
{
    scenario_spec s = scenario_a(6, 20.0, 4);
    int better = 0;
    for (int t = 0; t < 10; ++t) {
        eigen_sample es = sample_of(s, t);
        double good = score_hypothesis({2, 2, 2}, es, s.noise).score;
        double bad = score_hypothesis({6}, es, s.noise).score;
        better += good < bad;
    }
    CHECK(better == 10);
}

TEST_CASE("inference is deterministic and ranks by score")
{
    scenario_spec s = scenario_a(6, 30.0, 8);
    eigen_sample es = sample_of(s, 0);
    auto a = infer_joint(es, 6, 3, s.noise);
    auto b = infer_joint(es, 6, 3, s.noise);
    CHECK(a.best.n_hats == b.best.n_hats);
    CHECK(a.best.score == b.best.score);
    CHECK(a.ranking.size() == 16);
    for (std::size_t i = 1; i < a.ranking.size(); ++i) CHECK(a.ranking[i - 1].score <= a.ranking[i].score);
    CHECK(a.best.n_hats == std::vector<int>{2, 2, 2});
    CHECK(a.best.estimates.size() == 3);
    CHECK(a.sigma2_used == s.noise.sigma2);

    std::vector<double> shuffled = es.lambdas;
    std::reverse(shuffled.begin(), shuffled.end());
    auto r = infer_joint(make_eigen_sample(shuffled, es.M), 6, 3, s.noise);
    REQUIRE(r.ranking.size() == a.ranking.size());
    for (std::size_t i = 0; i < r.ranking.size(); ++i) {
        CHECK(r.ranking[i].n_hats == a.ranking[i].n_hats);
        CHECK(r.ranking[i].score == a.ranking[i].score);
    }

    inference_options blind;
    blind.blind_sigma2 = true;
    auto c = infer_joint(es, 6, 3, s.noise, blind);
    CHECK(c.sigma2_used != s.noise.sigma2);
    CHECK(std::abs(c.sigma2_used - s.noise.sigma2) < 0.2 * s.noise.sigma2);
}

TEST_CASE("score is the empirical vs model Stieltjes distance")
{
    scenario_spec s = scenario_a(6, 20.0, 1);
    eigen_sample es = sample_of(s, 0);
    auto grid = score_grid({});
    CHECK(grid.size() == 46);
    CHECK(grid.front() == -1.0);
    CHECK(std::abs(grid.back() + 0.1) < 1e-15);
    CHECK(empirical_stieltjes({1.0, 3.0}, -1.0) == doctest::Approx(0.5 * (0.5 + 0.25)).epsilon(1e-15));
    auto h = score_hypothesis({2, 2, 2}, es, s.noise);
    CHECK(std::isfinite(h.score));
    CHECK(h.score >= 0.0);
}

TEST_CASE("closely spaced powers are merged into one group")
{
    scenario_spec s{power_profile({1, 3, 3.2}, {10, 10, 10}), system_shape(300, 3000, 30), noise_level(0.01),
                    constellation::qpsk, 3};
    const int trials = 40;
    int merged = 0;
    for (int t = 0; t < trials; ++t) {
        auto r = infer_joint(sample_of(s, t), 30, 3, s.noise);
        bool grouped = r.best.n_hats == std::vector<int>{10, 20};
        merged += grouped && r.best.estimates[1] >= 3.0 && r.best.estimates[1] <= 3.2;
    }
    CHECK(2 * merged > trials);
}

TEST_CASE("larger dimension sharpens the score gap")
{
    double g6 = 0.0, g60 = 0.0;
    for (int t = 0; t < 3; ++t) {
        scenario_spec a = scenario_a(6, 20.0, 6), b = scenario_a(60, 20.0, 6);
        eigen_sample ea = sample_of(a, t), eb = sample_of(b, t);
        g6 += score_hypothesis({2, 2, 2}, ea, a.noise).score;
        g60 += score_hypothesis({20, 20, 20}, eb, b.noise).score;
    }
    CHECK(g60 < g6);
}
