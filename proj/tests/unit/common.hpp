#pragma once

#include <gtest/gtest.h>

#include "diffeo/diffeo.hpp"

// Runs `stmt` and checks that it raises a diffeo::Error with the given code.
#define EXPECT_DIFFEO_ERROR(stmt, expected_code)                                        \
  do {                                                                                  \
    bool raised_ = false;                                                               \
    try {                                                                               \
      (void)(stmt);                                                                     \
    } catch (const diffeo::Error& e_) {                                                 \
      raised_ = true;                                                                   \
      EXPECT_EQ(diffeo::to_string(e_.code()), diffeo::to_string(expected_code)) << e_.what(); \
    }                                                                                   \
    EXPECT_TRUE(raised_) << #stmt " did not raise";                                     \
  } while (0)
