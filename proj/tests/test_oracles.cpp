#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "subemb/ensembles.hpp"
#include "subemb/oracles.hpp"

namespace {

using namespace subemb;
namespace o = subemb::oracles;

// Reference values computed independently with 50-digit arithmetic.
struct Frozen {
    std::size_t m;
    std::size_t s;
    double value;
};
constexpr Frozen kSqrtDeviation[] = {
    {2, 1, 0.3535533905932737622},       {50, 5, 0.38887690939973547341},   {200, 5, 0.40579072975958465134},
    {200, 20, 0.38001659051293763133},   {250, 25, 0.37968215471646846973}, {2500, 25, 0.3983538908287123484},
    {25000, 25, 0.4001732103280866},
};

TEST(BinomSqrtDeviation, FrozenValues) {
    for (const auto& f : kSqrtDeviation) {
        const auto v = o::binom_sqrt_deviation(f.m, f.s);
        EXPECT_NEAR(v.value, f.value, 1e-12 * f.value) << f.m << "," << f.s;
        EXPECT_EQ(v.method, o::Method::PmfSum);
    }
}

TEST(BinomSqrtDeviation, Examples) {
    EXPECT_EQ(o::binom_sqrt_deviation(1, 1).value, 0.0);
    // 3-term sum: (1/4) * 1 + (1/2) * 0 + (1/4) * (sqrt 2 - 1)
    EXPECT_NEAR(o::binom_sqrt_deviation(2, 1).value, 0.25 + 0.25 * (std::sqrt(2.0) - 1.0), 1e-15);
    const double limit = std::sqrt(2.0 / std::numbers::pi) / 2.0;
    EXPECT_NEAR(o::binom_sqrt_deviation(25000, 25).value, limit, 0.15 * limit);
    EXPECT_THROW(o::binom_sqrt_deviation(3, 4), ParameterError);
    EXPECT_THROW(o::binom_sqrt_deviation(3, 0), ParameterError);
}

TEST(BinomSqrtDeviation, LargeMDoesNotUnderflow) {
    const double v = o::binom_sqrt_deviation(100000, 40).value;
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GT(v, 0.3);
    EXPECT_LT(v, 0.45);
}

TEST(CentralMoments, Examples) {
    EXPECT_NEAR(o::binom_central_moments(2, 1).second, 0.5, 1e-15);
    EXPECT_NEAR(o::binom_central_moments(7, 7).second, 0.0, 1e-15);
    const auto c = o::binom_central_moments(100, 10);
    EXPECT_NEAR(c.second, 9.0, 9e-10);
    EXPECT_NEAR(c.fourth, 247.14, 1e-8);
    EXPECT_LE(c.fourth / 100.0, 4.0);
}

TEST(CentralMoments, SecondIsMpq) {
    for (std::size_t m : {3u, 17u, 100u, 1000u}) {
        for (std::size_t s : {1u, 2u, 3u}) {
            const double p = static_cast<double>(s) / static_cast<double>(m);
            const double mpq = static_cast<double>(m) * p * (1 - p);
            const auto c = o::binom_central_moments(m, s);
            EXPECT_NEAR(c.second, mpq, 1e-10 * mpq);
            if (2 * s <= m) {
                EXPECT_GE(c.second, static_cast<double>(s) / 2.0);
            }
        }
    }
}

TEST(Collision, Examples) {
    EXPECT_DOUBLE_EQ(o::collision_probability(4, 1).value, 0.125);
    EXPECT_DOUBLE_EQ(o::collision_probability(2, 1).value, 0.25);
    EXPECT_DOUBLE_EQ(o::collision_probability(6, 6).value, std::ldexp(1.0, -6));
    EXPECT_EQ(o::exact_sparse_count(5, 2), 40u);
    EXPECT_THROW(o::collision_probability(200, 100), OverflowError);
}

TEST(ChooseN, Examples) {
    // ceil((4e)^3) = ceil(1285.47...)
    EXPECT_EQ(o::choose_n_for_lower_bound(2, 1), 1286u);
    // ceil((8e)^3) = ceil(10283.79...)
    EXPECT_EQ(o::choose_n_for_lower_bound(4, 1), 10284u);
    // m = s: ceil((2e)^{3s})
    EXPECT_EQ(o::choose_n_for_lower_bound(1, 1), 161u);
    EXPECT_EQ(o::choose_n_for_lower_bound(2, 2),
              static_cast<std::uint64_t>(std::ceil(std::pow(2.0 * std::numbers::e, 6.0))));
    EXPECT_THROW(o::choose_n_for_lower_bound(100, 10), OverflowError);
}

TEST(Enumerate, CountsAndNorms) {
    const auto all = o::enumerate_exact_sparse(5, 2);
    EXPECT_EQ(all.size(), 40u);
    std::set<std::vector<std::pair<std::uint32_t, int>>> distinct;
    for (const auto& c : all) {
        EXPECT_EQ(column_norm(c), std::sqrt(2.0));
        std::vector<std::pair<std::uint32_t, int>> key;
        for (const auto& e : c.entries) {
            key.emplace_back(e.row, e.sign);
        }
        distinct.insert(key);
    }
    EXPECT_EQ(distinct.size(), 40u);

    const auto full = o::enumerate_exact_sparse(3, 3);
    EXPECT_EQ(full.size(), 8u);
    for (const auto& c : full) {
        ASSERT_EQ(c.entries.size(), 3u);
    }
    // Lexicographic: first support {0,1} with signs (-,-), (-,+), (+,-), (+,+).
    EXPECT_EQ(all[0].entries[0].sign, -1);
    EXPECT_EQ(all[1].entries[1].sign, 1);
    EXPECT_EQ(all[4].entries[1].row, 2u);
    EXPECT_THROW(o::enumerate_exact_sparse(40, 8), BudgetExceeded);
}

TEST(ChiSquare, StatisticAndDegreesOfFreedom) {
    std::vector<std::uint64_t> counts(40, 100);
    counts[0] = 139;
    counts[1] = 61;
    const auto c = o::chi_square_uniform(counts);
    EXPECT_NEAR(c.statistic, 2.0 * 39.0 * 39.0 / 100.0, 1e-9);
    EXPECT_EQ(c.degrees_of_freedom, 39u);
    EXPECT_THROW(o::chi_square_uniform(std::vector<std::uint64_t>{5}), ParameterError);
    EXPECT_THROW(o::chi_square_uniform(std::vector<std::uint64_t>{0, 0}), ParameterError);
}

TEST(ChiSquare, PValueMatchesReferenceSurvival) {
    // Reference: chi2.sf(45, 39) and chi2.sf(10, 3) from an independent statistics library.
    std::vector<std::uint64_t> forty(40, 100);
    forty[0] = 145;  // squared deviations 2025 + 2025 + 225 + 225 = 4500, over 100
    forty[1] = 55;
    forty[2] = 115;
    forty[3] = 85;
    const auto c = o::chi_square_uniform(forty);
    EXPECT_NEAR(c.statistic, 45.0, 1e-12);
    EXPECT_NEAR(c.p_value, 0.23514400387861648, 1e-12);

    const std::vector<std::uint64_t> four{35, 15, 30, 20};  // (100 + 100 + 25 + 25) / 25
    const auto f = o::chi_square_uniform(four);
    EXPECT_NEAR(f.statistic, 10.0, 1e-12);
    EXPECT_NEAR(f.p_value, 0.01856613546304325, 1e-12);
}

TEST(ExactMgf, LambdaZeroIsOne) {
    const std::vector<double> grid{0.0};
    const std::vector<double> x{0.6, 0.8};
    for (const auto& spec : {EnsembleSpec::exact_sparse(3, 2, 2), EnsembleSpec::approx_sparse(3, 2, 1),
                             EnsembleSpec::dense_rademacher(3, 2)}) {
        EXPECT_NEAR(o::exact_mgf_small(spec, x, grid)[0], 1.0, 1e-15);
    }
}

TEST(ExactMgf, SingleUnitColumnIsDegenerate) {
    const std::vector<double> grid{-1.0, 0.5, 2.0};
    const std::vector<double> x{1.0};
    for (const auto& spec : {EnsembleSpec::exact_sparse(4, 1, 1), EnsembleSpec::dense_rademacher(3, 1)}) {
        for (double v : o::exact_mgf_small(spec, x, grid)) {
            EXPECT_NEAR(v, 1.0, 1e-15);
        }
    }
}

TEST(ExactMgf, TwoColumnsTwoRows) {
    // <A1, A2> in {-1, 0, 1} w.p. {1/4, 1/2, 1/4}, S = <A1, A2>.
    const std::vector<double> grid{-1.0, -0.5, 0.0, 0.5, 1.0};
    const double r = 1.0 / std::sqrt(2.0);
    const auto mgf = o::exact_mgf_small(EnsembleSpec::exact_sparse(2, 2, 1), std::vector<double>{r, r}, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_NEAR(mgf[i], 0.5 + 0.5 * std::cosh(grid[i]), 1e-12);
    }
    const double c = o::fit_mgf_constant(grid, mgf);
    EXPECT_TRUE(std::isfinite(c));
    EXPECT_GT(c, 0.0);
}

TEST(ExactMgf, SymmetricInLambdaForUnitColumnPairs) {
    // With unit columns and n = 2, S = 2 x1 x2 <A1, A2>, and flipping A2 negates S.
    const std::vector<double> grid{-0.8, -0.3, 0.3, 0.8};
    const std::vector<double> x{0.6, 0.8};
    for (const auto& spec : {EnsembleSpec::exact_sparse(3, 2, 1), EnsembleSpec::exact_sparse(5, 2, 1),
                             EnsembleSpec::dense_rademacher(3, 2)}) {
        const auto mgf = o::exact_mgf_small(spec, x, grid);
        EXPECT_NEAR(mgf[0], mgf[3], 1e-12 * mgf[0]) << to_string(spec.variant);
        EXPECT_NEAR(mgf[1], mgf[2], 1e-12 * mgf[1]) << to_string(spec.variant);
    }
}

TEST(ExactMgf, ThreeColumnsAreSkewed) {
    // Three 1-sparse columns: the pairwise inner products have a nonnegative
    // product, so S = 2 sum x_i x_j <A_i, A_j> leans positive for x > 0.
    const std::vector<double> grid{-0.8, 0.8};
    const std::vector<double> x{0.48, 0.6, 0.64};
    const auto mgf = o::exact_mgf_small(EnsembleSpec::exact_sparse(3, 3, 1), x, grid);
    EXPECT_GT(mgf[1], mgf[0]);
}

TEST(ExactMgf, BudgetsAndPreconditions) {
    const std::vector<double> grid{0.5};
    EXPECT_THROW(o::exact_mgf_small(EnsembleSpec::approx_sparse(5, 4, 1), std::vector<double>{0.5, 0.5, 0.5, 0.5},
                                    grid),
                 BudgetExceeded);
    EXPECT_THROW(o::exact_mgf_small(EnsembleSpec::exact_sparse(8, 4, 2), std::vector<double>{0.5, 0.5, 0.5, 0.5},
                                    grid),
                 BudgetExceeded);
    EXPECT_THROW(o::exact_mgf_small(EnsembleSpec::exact_sparse(2, 2, 1), std::vector<double>{1.0, 1.0}, grid),
                 ParameterError);
    EXPECT_THROW(o::exact_mgf_small(EnsembleSpec::dense_gaussian(2, 2), std::vector<double>{1.0, 0.0}, grid),
                 ParameterError);
}

TEST(ScalarPsi2, Examples) {
    EXPECT_NEAR(o::scalar_psi2_closed_form(o::ScalarLaw::parse("rademacher")).value, 1.2011224087864497949, 1e-15);
    EXPECT_NEAR(o::scalar_psi2_closed_form(o::ScalarLaw::parse("sparse_sign(4,1)")).value, 0.78824801589322875422,
                1e-15);
    EXPECT_EQ(o::scalar_psi2_closed_form(o::ScalarLaw::parse("constant(0)")).value, 0.0);
    EXPECT_NEAR(o::scalar_psi2_closed_form(o::ScalarLaw::parse("constant(-2)")).value, 2.0 * 1.2011224087864497949,
                1e-14);
    EXPECT_THROW(o::ScalarLaw::parse("gaussian"), ParameterError);
    EXPECT_THROW(o::ScalarLaw::parse("sparse_sign(4)"), ParameterError);
    EXPECT_THROW(o::ScalarLaw::parse("sparse_sign(4,9)"), ParameterError);
}

TEST(Quadrature, Examples) {
    const double abs_mean = std::sqrt(2.0 / std::numbers::pi);
    const auto e = o::quadrature(o::Integral::AbsGaussianMean);
    EXPECT_NEAR(e.value, 0.79788456080286535588, 1e-10);
    EXPECT_EQ(e.method, o::Method::Quadrature);
    EXPECT_GT(e.work, 0u);
    EXPECT_NEAR(o::quadrature(o::Integral::ChiMean, 1).value, abs_mean, 1e-10);
    EXPECT_NEAR(o::quadrature(o::Integral::MaxAbsPairMean).value, 1.1283791670955125739, 1e-10);
    EXPECT_NEAR(o::quadrature(o::Integral::ChiMean, 2).value, 1.2533141373155002512, 1e-10);
    EXPECT_NEAR(o::quadrature(o::Integral::ChiMean, 3).value, 1.5957691216057307118, 1e-10);
    EXPECT_THROW(o::integral_from_string("e_max_abs_triple"), ParameterError);
}

}  // namespace
