#ifndef OPALSHIFT_VERSION_HPP
#define OPALSHIFT_VERSION_HPP

namespace opalshift {
inline constexpr const char* version = "0.1.0";
}

#endif
