#pragma once

#include <stdexcept>
#include <string>

namespace qcidgram {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class GraphError : public Error {
public:
    using Error::Error;
};

} // namespace qcidgram
