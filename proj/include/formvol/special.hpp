#pragma once

namespace formvol {

// Gamma function from a Lanczos approximation (g = 7, nine terms). Relative
// error is below 1e-13 on [0.5, 50]; arguments below 0.5 use the recurrence
// Gamma(x) = Gamma(x + 1) / x and larger ones Gamma(x) = (x - 1) Gamma(x - 1).
double gamma_fn(double x);

double log_gamma_fn(double x);

}  // namespace formvol
