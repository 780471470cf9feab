#pragma once

#include <string_view>

namespace dbtsw {

/// Library version, "major.minor.patch".
std::string_view version() noexcept;

}  // namespace dbtsw
