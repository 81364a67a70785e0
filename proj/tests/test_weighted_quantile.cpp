#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cpforecast/rng.hpp"
#include "cpforecast/weighted_quantile.hpp"

using namespace cpf;

namespace {

// Independent oracle: sort atoms, accumulate weights plainly, scan for the
// first value whose cumulative mass reaches tau of the total.
double oracle_quantile(const AtomDistribution& dist, double tau) {
    std::vector<Atom> atoms(dist.begin(), dist.end());
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.value < b.value; });
    double total = 0.0;
    for (const auto& a : atoms) total += a.weight;
    double cum = 0.0;
    for (const auto& a : atoms) {
        cum += a.weight;
        if (cum >= tau * total) return a.value;
    }
    return atoms.back().value;
}

AtomDistribution random_dist(Rng& rng, int max_atoms) {
    int n = 1 + static_cast<int>(rng.next_u64() % static_cast<unsigned>(max_atoms));
    AtomDistribution d;
    d.reserve(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i < n; ++i) {
        double value = 10.0 * rng.uniform_sym();
        if (rng.next_u64() % 5 == 0) value = std::round(value); // force ties
        d.push_back({value, rng.uniform01()});
    }
    if (rng.next_u64() % 2 == 0) d.push_back({kInf, rng.uniform01()});
    return d;
}

} // namespace

TEST(WeightedQuantile, SpecExamples) {
    AtomDistribution d{{1, .2}, {2, .2}, {3, .2}, {4, .2}, {kInf, .2}};
    EXPECT_EQ(weighted_quantile(d, 0.5), 3.0);
    EXPECT_EQ(weighted_quantile(d, 0.9), kInf); // cum at 4 is 0.8 < 0.9
    AtomDistribution single{{7.25, 1.0}};
    EXPECT_EQ(weighted_quantile(single, 0.01), 7.25);
    EXPECT_EQ(weighted_quantile(single, 1.0), 7.25);
}

TEST(WeightedQuantile, OracleEquivalence10k) {
    Rng rng(20240601);
    for (int i = 0; i < 10000; ++i) {
        auto d = random_dist(rng, 1000);
        double tau = rng.uniform01();
        if (tau <= 0.0) tau = 0.5;
        ASSERT_EQ(weighted_quantile(d, tau), oracle_quantile(d, tau))
            << "instance " << i << " tau " << tau;
    }
}

TEST(WeightedQuantile, MonotoneInTau) {
    Rng rng(7);
    for (int i = 0; i < 500; ++i) {
        auto d = random_dist(rng, 50);
        double t1 = 0.05 + 0.9 * rng.uniform01();
        double t2 = 0.05 + 0.9 * rng.uniform01();
        if (t1 > t2) std::swap(t1, t2);
        EXPECT_LE(weighted_quantile(d, t1), weighted_quantile(d, t2));
    }
}

TEST(WeightedQuantile, EqualWeightSpecialization) {
    // t_c equal-weight atoms plus one +inf atom at tau = 1 - alpha is the
    // split-conformal threshold: the ceil((1-alpha)(t_c+1))-th order statistic
    Rng rng(11);
    const int t_c = 40;
    const double alpha = 0.1;
    for (int rep = 0; rep < 100; ++rep) {
        AtomDistribution d;
        std::vector<double> scores;
        for (int i = 0; i < t_c; ++i) {
            double s = rng.gaussian();
            scores.push_back(s);
            d.push_back({s, 1.0 / (t_c + 1)});
        }
        d.push_back({kInf, 1.0 / (t_c + 1)});
        double got = weighted_quantile(d, 1.0 - alpha);
        std::sort(scores.begin(), scores.end());
        int k = static_cast<int>(std::ceil((1.0 - alpha) * (t_c + 1)));
        double want = k > t_c ? kInf : scores[static_cast<std::size_t>(k - 1)];
        EXPECT_EQ(got, want);
    }
}

TEST(WeightedQuantile, ScaleFreeInWeights) {
    Rng rng(13);
    for (int i = 0; i < 500; ++i) {
        auto d = random_dist(rng, 100);
        double tau = 0.05 + 0.9 * rng.uniform01();
        double base = weighted_quantile(d, tau);
        for (double c : {0.5, 2.0, 1024.0, 0.0078125}) {
            AtomDistribution scaled = d;
            for (auto& a : scaled) a.weight *= c;
            EXPECT_EQ(weighted_quantile(scaled, tau), base);
        }
    }
}

TEST(WeightedQuantile, ErrorCases) {
    EXPECT_THROW(weighted_quantile({}, 0.5), std::invalid_argument);
    AtomDistribution d{{1.0, 1.0}};
    EXPECT_THROW(weighted_quantile(d, 0.0), std::invalid_argument);
    EXPECT_THROW(weighted_quantile(d, 1.5), std::invalid_argument);
    EXPECT_THROW(weighted_quantile({{1.0, -0.5}}, 0.5), std::invalid_argument);
    EXPECT_THROW(weighted_quantile({{1.0, 0.0}}, 0.5), std::invalid_argument);
    EXPECT_THROW(weighted_quantile({{kInf, 0.5}, {kInf, 0.5}}, 0.5),
                 std::invalid_argument);
    EXPECT_THROW(weighted_quantile({{-kInf, 1.0}}, 0.5), std::invalid_argument);
}

TEST(MwcpWeights, SpecExamples) {
    auto w2 = mwcp_weights(2, 0.99);
    const double denom = 2.9701;
    EXPECT_NEAR(w2.weights[0], 0.9801 / denom, 1e-12); // oldest
    EXPECT_NEAR(w2.weights[1], 0.99 / denom, 1e-12);
    EXPECT_NEAR(w2.tail_weight, 1.0 / denom, 1e-12);

    auto w1 = mwcp_weights(1, 0.5);
    EXPECT_NEAR(w1.weights[0], 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(w1.tail_weight, 2.0 / 3.0, 1e-15);
}

TEST(MwcpWeights, SumsToOneAndDecaysWithAge) {
    Rng rng(17);
    for (int rep = 0; rep < 200; ++rep) {
        int n = 1 + static_cast<int>(rng.next_u64() % 700);
        double b = 0.01 + 0.98 * rng.uniform01();
        auto w = mwcp_weights(n, b);
        KahanSum total;
        for (double x : w.weights) total.add(x);
        total.add(w.tail_weight);
        EXPECT_NEAR(total.value(), 1.0, 1e-12);
        EXPECT_TRUE(std::is_sorted(w.weights.begin(), w.weights.end()));
        EXPECT_GT(w.tail_weight, w.weights.back()); // tail outweighs the newest
    }
}

TEST(MwcpWeights, ErrorCases) {
    EXPECT_THROW(mwcp_weights(0, 0.5), std::invalid_argument);
    EXPECT_THROW(mwcp_weights(5, 0.0), std::invalid_argument);
    EXPECT_THROW(mwcp_weights(5, 1.0), std::invalid_argument);
}
