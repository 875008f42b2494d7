#pragma once

#include <stdexcept>
#include <string>

namespace thhcalc {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A boundary vector lies outside the cycle span.
class ContainmentError : public Error {
public:
    ContainmentError(std::size_t index, const std::string& what) : Error(what), index_(index) {}
    std::size_t boundary_index() const { return index_; }

private:
    std::size_t index_;
};

class PresentationError : public Error {
public:
    using Error::Error;
};

class WindowError : public Error {
public:
    using Error::Error;
};

class DifferentialError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(int line, int column, const std::string& msg)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg), line_(line), column_(column)
    {
    }
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

// Semantic scenario error carrying the offending field path.
class ScenarioError : public Error {
public:
    ScenarioError(std::string field, const std::string& msg) : Error(field + ": " + msg), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

}  // namespace thhcalc
