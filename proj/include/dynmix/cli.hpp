#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

#include "dynmix/params.hpp"

namespace dynmix::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Environment variable consulted for the default --seed.
inline constexpr const char* kSeedEnv = "DYNMIX_SEED";

// Runs one invocation; args[0] is the program name. Returns the exit code.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

// "pi", "-pi/2", "2pi/3", "3*pi/4", "0.25" ... Throws UsageError.
double parse_angle(const std::string& text);

// Positive integer or "inf". Throws UsageError.
AncillaCount parse_ancilla_count(const std::string& text);

std::uint64_t default_seed();

} // namespace dynmix::cli
