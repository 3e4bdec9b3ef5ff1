#pragma once

namespace clausekit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace clausekit
