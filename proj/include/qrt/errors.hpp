#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qrt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed document. `position` is a byte offset when the JSON itself is
/// broken, or npos when the document parsed but a field is wrong.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position = npos)
        : Error(what), position_(position) {}
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class UnsupportedError : public Error { public: using Error::Error; };
class ArityError : public Error { public: using Error::Error; };
class ParameterError : public Error { public: using Error::Error; };
class ModeError : public Error { public: using Error::Error; };
class ResourceError : public Error { public: using Error::Error; };
class CoverageError : public Error { public: using Error::Error; };

}  // namespace qrt
