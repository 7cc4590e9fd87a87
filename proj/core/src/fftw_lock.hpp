#pragma once

#include <mutex>

namespace widthlab::detail {

// FFTW planning and plan destruction are not thread-safe; every call site shares this lock.
std::mutex& fftw_planner_mutex();

} // namespace widthlab::detail
