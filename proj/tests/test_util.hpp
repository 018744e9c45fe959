#pragma once

#include <gtest/gtest.h>

#include <cmath>

#include "formvol/errors.hpp"

// Asserts that `stmt` throws formvol::Error with the given code.
#define EXPECT_FV_ERROR(stmt, expected_code)                                      \
  do {                                                                            \
    try {                                                                         \
      stmt;                                                                       \
      ADD_FAILURE() << "expected formvol::Error from " #stmt;                     \
    } catch (const formvol::Error& e) {                                           \
      EXPECT_EQ(e.code(), expected_code) << e.what();                             \
    }                                                                             \
  } while (0)

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }
