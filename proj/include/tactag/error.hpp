#ifndef TACTAG_ERROR_HPP
#define TACTAG_ERROR_HPP

#include <stdexcept>
#include <string>

namespace tactag {

// Filesystem / stream failures. Messages carry the offending path.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent persisted data (manifest, masks, clouds).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical breakdown (degenerate geometry, rank deficiency).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace tactag

#endif
