#pragma once

#include <stdexcept>
#include <string>

namespace mbsense {

/// Argument outside the mathematical or configuration domain of an operation.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Input is well-formed but carries no usable information (zero power, etc.).
class DegenerateInputError : public std::runtime_error {
public:
    explicit DegenerateInputError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or unreadable sample/config file.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace mbsense
