#pragma once

namespace pathnnt {

enum class LinkFamily { kLogit, kProbit };

const char* link_name(LinkFamily family);

/// Inverse link evaluated at the linear predictor x.
/// Logit: 1/(1+exp(-x)). Probit: standard normal CDF.
/// The result is clamped to [1e-12, 1 - 1e-12] so score weights never
/// divide by an exact zero.
double inv_link(LinkFamily family, double x);

/// First derivative of the inverse link (always > 0 for moderate x).
double inv_link_deriv(LinkFamily family, double x);

/// Standard normal density.
double normal_pdf(double x);

/// Standard normal CDF without the probability clamp.
double normal_cdf(double x);

/// Standard normal quantile (inverse CDF), accurate to full double
/// precision for p in (0, 1).
double normal_quantile(double p);

}  // namespace pathnnt
