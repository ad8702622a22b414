#pragma once

#include <stdexcept>
#include <string>

namespace codemie {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input, schema violations, invalid records. CLI exit code 1.
class DataError : public Error {
public:
    using Error::Error;
};

// Endpoint unreachable, HTTP failures after retries. CLI exit code 2.
class TransportError : public Error {
public:
    using Error::Error;
};

} // namespace codemie
