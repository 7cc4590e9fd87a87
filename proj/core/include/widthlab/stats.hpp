#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace widthlab {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t count = 0;
};

// Ordinary least squares y = intercept + slope * x.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Least squares on (log x, log y); every value must be positive.
LineFit fit_log_log(const std::vector<double>& x, const std::vector<double>& y);

// log2(max x / min x).
double octave_span(const std::vector<double>& x);

// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);

// Fixed-width lowercase hex.
std::string hex64(std::uint64_t v);

} // namespace widthlab
