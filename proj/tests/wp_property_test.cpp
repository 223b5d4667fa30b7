#include <gtest/gtest.h>

#include "wp_properties.hpp"

TEST(WpProperties, ConjunctivityAndAssignmentOnRandomPrograms) {
    auto rep = testutil::check_wp_properties(200, 11, 20000);
    EXPECT_EQ(rep.cases, 200);
    EXPECT_EQ(rep.proved, 400);
    EXPECT_GT(rep.evaluated, 500);
    for (const auto& f : rep.failures) ADD_FAILURE() << f;
}
