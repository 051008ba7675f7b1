#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "subemb/ensembles.hpp"
#include "subemb/isometry.hpp"
#include "subemb/oracles.hpp"
#include "subemb/random.hpp"
#include "subemb/testsets.hpp"

namespace {

using namespace subemb;

Vector unit_gaussian(std::size_t n, std::uint64_t seed) {
    Stream s({seed, 0, 0}, StreamDomain::Gaussian);
    Vector x(n);
    for (double& v : x) {
        v = s.normal();
    }
    const double nrm = norm2(x);
    for (double& v : x) {
        v /= nrm;
    }
    return x;
}

TEST(IsometryTrials, ExactSparseSingletonIsExact) {
    const auto r = isometry_trials(EnsembleSpec::exact_sparse(30, 1, 4), build_set(SetKind::Singleton, {.n = 1}), 2.0,
                                   500, 3);
    EXPECT_EQ(r.mean, 0.0);
    EXPECT_EQ(r.max, 0.0);
}

TEST(IsometryTrials, ApproxSparseMatchesBinomialOracle) {
    const auto r = isometry_trials(EnsembleSpec::approx_sparse(50, 1, 5), build_set(SetKind::Singleton, {.n = 1}),
                                   std::sqrt(5.0), 100000, 11);
    EXPECT_LE(std::abs(r.mean - oracles::binom_sqrt_deviation(50, 5).value), 3.0 * r.std_error);
}

TEST(IsometryTrials, SingleTrial) {
    const auto r = isometry_trials(EnsembleSpec::dense_gaussian(5, 4), build_set(SetKind::PairDifferences, {.n = 4}),
                                   1.0, 1, 7, true);
    EXPECT_EQ(r.min, r.max);
    EXPECT_EQ(r.mean, r.min);
    EXPECT_EQ(r.per_trial.size(), 1u);
    EXPECT_EQ(r.std_error, 0.0);
    EXPECT_THROW(isometry_trials(EnsembleSpec::dense_gaussian(5, 4), build_set(SetKind::Singleton, {.n = 4}), 1.0, 0, 7),
                 ParameterError);
}

TEST(IsometryTrials, ReportInvariants) {
    const auto r = isometry_trials(EnsembleSpec::approx_sparse(40, 10, 3), build_set(SetKind::PairDifferences, {.n = 10}),
                                   std::sqrt(3.0), 300, 2, true);
    EXPECT_LE(r.min, r.q50);
    EXPECT_LE(r.q50, r.q90);
    EXPECT_LE(r.q90, r.q99);
    EXPECT_LE(r.q99, r.max);
    EXPECT_GE(r.std_error, 0.0);
    EXPECT_EQ(r.per_trial.size(), r.trials);
    auto sorted = r.per_trial;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(r.q90, sorted[269]);  // ceil(0.9 * 300) = 270th smallest
    EXPECT_EQ(isometry_trials(EnsembleSpec::approx_sparse(40, 10, 3), build_set(SetKind::PairDifferences, {.n = 10}),
                              std::sqrt(3.0), 300, 2, false)
                  .per_trial.size(),
              0u);
}

TEST(Increment, RayHomogeneity) {
    const auto a = sample_matrix(EnsembleSpec::dense_gaussian(6, 5), {1, 0, 0});
    const auto x = unit_gaussian(5, 3);
    Vector y(x);
    for (double& v : y) {
        v *= 2.0;
    }
    const double lambda = 1.3;
    const double zx = norm2(matvec(a, x)) - lambda * norm2(x);
    const auto inc = increment_sample(a, x, y, lambda);
    EXPECT_NEAR(inc.ratio, -zx / norm2(x), 1e-12);
}

TEST(Increment, IdentityGivesZero) {
    const ColumnMatrix id(3, {DenseColumn{{1, 0, 0}}, DenseColumn{{0, 1, 0}}, DenseColumn{{0, 0, 1}}});
    const auto inc = increment_sample(id, Vector{0.3, -2.0, 1.0}, Vector{1.0, 1.0, 0.5}, 1.0);
    EXPECT_NEAR(inc.ratio, 0.0, 1e-15);
    EXPECT_THROW(increment_sample(id, Vector{1, 2, 3}, Vector{1, 2, 3}, 1.0), DegenerateInput);
    EXPECT_THROW(increment_sample(id, Vector{1, 2}, Vector{1, 2, 3}, 1.0), DimensionMismatch);
}

TEST(Increment, SquaredProcessIdentity) {
    // Equal column norms: the diagonal part of ||Ax||^2 - ||Ay||^2 cancels for unit x, y.
    const std::size_t n = 12;
    const auto spec = EnsembleSpec::exact_sparse(20, n, 4);
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        const auto a = sample_matrix(spec, {4, trial, 0});
        const auto x = unit_gaussian(n, 2 * trial);
        const auto y = unit_gaussian(n, 2 * trial + 1);
        const auto inc = increment_sample(a, x, y, 1.0);
        ASSERT_NEAR(inc.squared_ratio, squared_ratio_off_diagonal(a, x, y), 1e-10);
    }
}

TEST(Psi2, RademacherRoot) {
    std::vector<double> z(1000);
    for (std::size_t i = 0; i < z.size(); ++i) {
        z[i] = i % 2 == 0 ? 1.0 : -1.0;
    }
    const auto fit = empirical_psi2(z, Psi2Method::MgfRoot);
    EXPECT_NEAR(fit.value, 1.0 / std::sqrt(std::numbers::ln2), 1e-8);
    EXPECT_NEAR(fit.value, 1.2011224087864497949, 1e-8);
    EXPECT_EQ(fit.method, Psi2Method::MgfRoot);
}

TEST(Psi2, ZerosGiveZero) {
    const std::vector<double> z(200, 0.0);
    EXPECT_EQ(empirical_psi2(z, Psi2Method::MgfRoot).value, 0.0);
    EXPECT_EQ(empirical_psi2(z, Psi2Method::MomentSup).value, 0.0);
}

TEST(Psi2, SparseScalarExactLaw) {
    // m = 4, s = 1: +1 and -1 with probability 1/8 each, else 0.
    std::vector<double> z(800, 0.0);
    for (std::size_t i = 0; i < 100; ++i) {
        z[i] = 1.0;
        z[100 + i] = -1.0;
    }
    const double closed = 1.0 / std::sqrt(std::log(5.0));
    EXPECT_NEAR(closed, 0.78824801589322875422, 1e-15);
    EXPECT_NEAR(empirical_psi2(z, Psi2Method::MgfRoot).value, closed, 1e-8);
}

TEST(Psi2, Errors) {
    EXPECT_THROW(empirical_psi2(std::vector<double>(50, 1.0), Psi2Method::MgfRoot), ParameterError);
    std::vector<double> heavy(200, 0.0);
    heavy[0] = 1e12;
    EXPECT_THROW(empirical_psi2(heavy, Psi2Method::MgfRoot), OverflowError);
    std::vector<double> bad(200, 1.0);
    bad[3] = std::nan("");
    EXPECT_THROW(empirical_psi2(bad, Psi2Method::MgfRoot), ParameterError);
}

TEST(Psi2, ScalesExactly) {
    Stream s({3, 0, 0});
    std::vector<double> z(5000);
    for (double& v : z) {
        v = s.normal();
    }
    std::vector<double> cz(z);
    for (double& v : cz) {
        v *= 3.7;
    }
    for (auto method : {Psi2Method::MgfRoot, Psi2Method::MomentSup}) {
        const double base = empirical_psi2(z, method).value;
        EXPECT_NEAR(empirical_psi2(cz, method).value, 3.7 * base, 1e-6 * base);
    }
}

TEST(Psi2, ConsistentWithClosedForms) {
    const std::size_t n = 100000;
    Stream s({21, 0, 0});
    std::vector<double> rad(n);
    std::vector<double> sparse(n);
    const std::size_t m = 10;
    const std::size_t k = 2;
    for (std::size_t i = 0; i < n; ++i) {
        rad[i] = s.sign();
        const auto u = s.bounded(2 * m);
        sparse[i] = u < k ? 1.0 : (u < 2 * k ? -1.0 : 0.0);  // +-1 with probability k/2m each
    }
    const double rad_closed = oracles::scalar_psi2_closed_form(oracles::ScalarLaw::parse("rademacher")).value;
    const double sparse_closed = oracles::scalar_psi2_closed_form(oracles::ScalarLaw::parse("sparse_sign(10,2)")).value;
    EXPECT_NEAR(empirical_psi2(rad, Psi2Method::MgfRoot).value / rad_closed, 1.0, 0.05);
    EXPECT_NEAR(empirical_psi2(sparse, Psi2Method::MgfRoot).value / sparse_closed, 1.0, 0.05);
}

TEST(Psi2, MomentSupDefinition) {
    // All |Z| = 1: sup_p p^{-1/2} is attained at p = 2.
    std::vector<double> z(150, 1.0);
    EXPECT_NEAR(empirical_psi2(z, Psi2Method::MomentSup).value, 1.0 / std::sqrt(2.0), 1e-15);
}

}  // namespace
