#ifndef OPALSHIFT_ERRORS_HPP
#define OPALSHIFT_ERRORS_HPP

#include <stdexcept>

namespace opalshift {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace opalshift

#endif
