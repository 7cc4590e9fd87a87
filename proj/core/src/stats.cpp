#include "widthlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "widthlab/errors.hpp"

namespace widthlab {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) fail(ErrorCode::InvalidArgument, "fit needs matching x and y lengths");
  if (x.size() < 2) fail(ErrorCode::InvalidArgument, "fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) fail(ErrorCode::InvalidArgument, "fit needs finite values");
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) fail(ErrorCode::InvalidArgument, "fit needs at least two distinct x values");
  LineFit f;
  f.count = x.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    sse += e * e;
  }
  // A constant series is fitted exactly by a flat line.
  f.r2 = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  if (syy > 0.0 && sse <= 1e-28 * syy) f.r2 = 1.0;
  return f;
}

LineFit fit_log_log(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) fail(ErrorCode::InvalidArgument, "log-log fit needs positive abscissae");
    lx[i] = std::log(x[i]);
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] > 0.0)) fail(ErrorCode::InvalidArgument, "log-log fit needs positive values");
    ly[i] = std::log(y[i]);
  }
  return fit_line(lx, ly);
}

double octave_span(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (!(*lo > 0.0)) fail(ErrorCode::InvalidArgument, "octave span needs positive values");
  return std::log2(*hi / *lo);
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

} // namespace widthlab
