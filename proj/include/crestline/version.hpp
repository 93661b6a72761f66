#ifndef CRESTLINE_VERSION_HPP
#define CRESTLINE_VERSION_HPP

namespace crestline {

inline constexpr const char* version = "0.1.0";

} // namespace crestline

#endif
