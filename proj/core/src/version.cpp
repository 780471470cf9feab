#include "dbtsw/version.hpp"

namespace dbtsw {

std::string_view version() noexcept { return DBTSW_VERSION; }

}  // namespace dbtsw
