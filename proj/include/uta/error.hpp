#ifndef UTA_ERROR_HPP
#define UTA_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uta {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed term syntax. `offset` is the byte offset of the offending character.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class UnknownSymbol : public Error {
public:
    explicit UnknownSymbol(const std::string& symbol)
        : Error("unknown symbol '" + symbol + "'"), symbol_(symbol) {}
    const std::string& symbol() const noexcept { return symbol_; }

private:
    std::string symbol_;
};

class AlphabetMismatch : public Error {
public:
    using Error::Error;
};

class KindMismatch : public Error {
public:
    using Error::Error;
};

/// An automaton violates the invariants of its declared kind.
class InvalidAutomaton : public Error {
public:
    using Error::Error;
};

}  // namespace uta

#endif  // UTA_ERROR_HPP
