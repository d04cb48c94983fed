#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace vesselbez::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitItemFailed = 1;
inline constexpr int kExitConfigError = 2;

std::string version();

std::uint64_t fnv1a64(std::string_view text);

/// Seed for one batch item; depends only on the run seed and the item name, never on batch order.
std::uint64_t item_seed(std::uint64_t seed, std::string_view item);

/// Full command line without the program name, e.g. {"hint", "a.bte", "--out", "hints"}.
/// Returns 0 on success, 1 when any item failed, 2 on configuration errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vesselbez::cli
