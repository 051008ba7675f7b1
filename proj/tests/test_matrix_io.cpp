#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "subemb/ensembles.hpp"
#include "subemb/matrix_io.hpp"

namespace {

using namespace subemb;

TEST(MatrixIo, GoldenSparseDump) {
    const ColumnMatrix a(4, {SparseColumn{{{0, 1}, {3, -1}}}, SparseColumn{}, SparseColumn{{{2, -1}}, 0.5}});
    EXPECT_EQ(dump_matrix(a), "4 3\n"
                              "col 0 : 0:1 3:-1\n"
                              "col 1 :\n"
                              "col 2 scale 0.5 : 2:-1\n");
}

TEST(MatrixIo, GoldenDenseDump) {
    const ColumnMatrix a(2, {DenseColumn{{0.25, -3.0}}});
    EXPECT_EQ(dump_matrix(a), "2 1\ncol 0 dense : 0.25 -3\n");
}

TEST(MatrixIo, RoundTripEverySampler) {
    const std::vector<EnsembleSpec> specs{
        EnsembleSpec::dense_gaussian(7, 5),
        EnsembleSpec::dense_rademacher(7, 5),
        EnsembleSpec::approx_sparse(30, 6, 4),
        EnsembleSpec::exact_sparse(30, 6, 4),
        EnsembleSpec::column_normalized(EnsembleSpec::approx_sparse(30, 6, 4), std::sqrt(3.0)),
    };
    for (const auto& spec : specs) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto a = sample_matrix(spec, {seed, 1, 0});
            EXPECT_EQ(parse_matrix(dump_matrix(a)), a) << to_string(spec.variant);
        }
    }
}

TEST(MatrixIo, MalformedInputRejected) {
    EXPECT_THROW(parse_matrix(""), ParameterError);
    EXPECT_THROW(parse_matrix("3\n"), ParameterError);
    EXPECT_THROW(parse_matrix("3 1\nrow 0 : 1:1\n"), ParameterError);
    EXPECT_THROW(parse_matrix("3 1\ncol 1 : 1:1\n"), ParameterError);
    EXPECT_THROW(parse_matrix("3 1\ncol 0 : 1:2\n"), ParameterError);
    EXPECT_THROW(parse_matrix("3 1\ncol 0 : 5:1\n"), ParameterError);
    EXPECT_THROW(parse_matrix("3 1\ncol 0 : 2:1 1:1\n"), ParameterError);
    EXPECT_THROW(parse_matrix("3 1\ncol 0 dense : 1 2\n"), DimensionMismatch);
    EXPECT_THROW(parse_matrix("3 2\ncol 0 : 1:1\n"), ParameterError);
    EXPECT_THROW(parse_matrix("3 1\ncol 0 : x:1\n"), ParameterError);
}

}  // namespace
