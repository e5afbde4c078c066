#pragma once

#include <stdexcept>
#include <string>

namespace cmek {

/// Raised for every contract violation and I/O failure in the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cmek
