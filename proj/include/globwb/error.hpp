#pragma once

#include <stdexcept>
#include <string>

namespace globwb {

// Raised when an operation's precondition fails on well-formed input.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public DomainError {
public:
    ParseError(const std::string& what, std::size_t offset)
        : DomainError(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

} // namespace globwb
