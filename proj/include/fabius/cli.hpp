#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fabius/exact.hpp"

namespace fabius::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kCacheEnv = "FABIUS_TABLE_CACHE";

/// "k/2^m", "k/d" with d a power of two, an integer, or a terminating
/// decimal whose reduced denominator is a power of two. Throws ParseError
/// naming the offending token, or DomainError for values that are not
/// exactly representable as nonnegative dyadics.
DyadicRational parse_dyadic_literal(std::string_view text);

/// Any rational: "num/den", integer, or decimal, optional leading '-'.
ExactRational parse_real_literal(std::string_view text);

/// Runs one invocation; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace fabius::cli
