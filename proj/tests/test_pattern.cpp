#include <gtest/gtest.h>

#include "splr/pattern.hpp"
#include "test_support.hpp"

using namespace splr;
namespace fx = splr::fixtures;

namespace {

Mask mask_from(std::initializer_list<std::initializer_list<int>> rows) {
  Mask m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& row : rows) {
    Index j = 0;
    for (int v : row) m(i, j++) = v != 0;
    ++i;
  }
  return m;
}

}  // namespace

TEST(Feasibility, SemiStructuredGroupsRunDownColumns) {
  const SparsityPattern p = SemiStructured{2, 4};
  EXPECT_TRUE(is_feasible(mask_from({{1}, {0}, {1}, {0}}), p));
  EXPECT_FALSE(is_feasible(mask_from({{1}, {1}, {1}, {0}}), p));
  // Rows not divisible by M cannot carry the pattern.
  EXPECT_FALSE(is_feasible(mask_from({{1}, {0}, {0}}), p));
  // Transposed layout: one row of four is four groups' worth of columns.
  EXPECT_FALSE(is_feasible(mask_from({{1, 1, 1, 1}}), p));
}

TEST(Feasibility, UnstructuredBudgets) {
  const Mask m = mask_from({{1, 0}, {1, 1}});
  EXPECT_TRUE(is_feasible(m, Unstructured{3, Granularity::PerMatrix}));
  EXPECT_FALSE(is_feasible(m, Unstructured{2, Granularity::PerMatrix}));
  EXPECT_TRUE(is_feasible(m, Unstructured{2, Granularity::PerColumn}));
  EXPECT_FALSE(is_feasible(m, Unstructured{1, Granularity::PerColumn}));
  EXPECT_TRUE(is_feasible(m, Dense{}));
}

TEST(SelectSupport, TiesGoToLowestFlatIndex) {
  const MatrixXd scores = MatrixXd::Ones(2, 2);
  const Mask m = select_support(scores, Unstructured{2, Granularity::PerMatrix});
  EXPECT_EQ(m, mask_from({{1, 0}, {1, 0}}));
  const Mask nm = select_support(MatrixXd::Ones(4, 1), SemiStructured{2, 4});
  EXPECT_EQ(nm, mask_from({{1}, {1}, {0}, {0}}));
}

TEST(SelectSupport, AlwaysFeasible) {
  std::mt19937_64 rng(21);
  const std::vector<SparsityPattern> patterns = {SemiStructured{2, 4}, SemiStructured{1, 2}, SemiStructured{3, 8},
                                                 Unstructured{10, Granularity::PerMatrix},
                                                 Unstructured{3, Granularity::PerColumn}, Dense{}};
  for (int trial = 0; trial < 30; ++trial) {
    const MatrixXd s = fx::gaussian(8, 5, rng).cwiseAbs();
    for (const auto& p : patterns) {
      const Mask m = select_support(s, p);
      EXPECT_TRUE(is_feasible(m, p)) << to_string(p);
      EXPECT_EQ(m.count(), max_nonzeros(p, 8, 5)) << to_string(p);
    }
  }
}

TEST(Validate, RejectsShapesAndBudgets) {
  EXPECT_THROW(validate_pattern(SemiStructured{2, 4}, 6, 3), ContractError);
  EXPECT_THROW(validate_pattern(SemiStructured{5, 4}, 8, 3), ContractError);
  EXPECT_THROW(validate_pattern(SemiStructured{0, 4}, 8, 3), ContractError);
  EXPECT_THROW(validate_pattern(Unstructured{25, Granularity::PerMatrix}, 8, 3), ContractError);
  EXPECT_THROW(validate_pattern(Unstructured{9, Granularity::PerColumn}, 8, 3), ContractError);
  EXPECT_THROW(validate_pattern(Unstructured{-1, Granularity::PerMatrix}, 8, 3), ContractError);
  EXPECT_NO_THROW(validate_pattern(SemiStructured{2, 4}, 8, 3));
  EXPECT_NO_THROW(validate_pattern(Dense{}, 1, 1));
}

TEST(ParsePattern, RoundTrips) {
  for (const char* text : {"dense", "k:12", "kcol:3", "2:4", "4:8"}) {
    EXPECT_EQ(to_string(parse_pattern(text)), text);
  }
  EXPECT_THROW(parse_pattern("2:"), ContractError);
  EXPECT_THROW(parse_pattern("k:x"), ContractError);
  EXPECT_THROW(parse_pattern("sparse"), ContractError);
}

TEST(ApplyMask, ZeroesOutsideSupport) {
  MatrixXd w(2, 2);
  w << 1, 2, 3, 4;
  const SparseComponent s = apply_mask(w, mask_from({{1, 0}, {0, 1}}));
  MatrixXd expected(2, 2);
  expected << 1, 0, 0, 4;
  EXPECT_EQ(s.values, expected);
  EXPECT_EQ(s.nonzeros(), 2);
}
