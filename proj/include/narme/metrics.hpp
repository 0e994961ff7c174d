#pragma once

#include "narme/matrix.hpp"

namespace narme {

/// Sum of squared errors over the set (the comparison tables' "overall
/// variance in test values").
double overall_variance(const Matrix& pred, const Matrix& target);

/// Mean absolute error.
double test_mae(const Matrix& pred, const Matrix& target);

/// Largest k <= cap with max |error| < 0.5 * 10^-k; 0 when even k = 0 fails.
int decimal_accuracy(const Matrix& pred, const Matrix& target, int cap = 6);

/// Number of elements with |error| <= rel_tol * max(|target|, 1).
int correct_count(const Matrix& pred, const Matrix& target, double rel_tol = 0.01);

}  // namespace narme
