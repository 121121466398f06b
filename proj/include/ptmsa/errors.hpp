#pragma once

#include <stdexcept>
#include <string>

namespace ptmsa {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Problems with what the user handed us: netlists, parameters, flags.
class InputError : public Error {
public:
    using Error::Error;
};

// Numerical or analysis failures on otherwise valid input.
class SolverError : public Error {
public:
    using Error::Error;
};

class ParseError : public InputError {
public:
    ParseError(int line, int column, std::string token, std::string expected, const std::string& what)
        : InputError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what +
                     (token.empty() ? std::string{} : " at '" + token + "'") +
                     (expected.empty() ? std::string{} : " (expected " + expected + ")")),
          line_(line), column_(column), token_(std::move(token)), expected_(std::move(expected)) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    const std::string& token() const noexcept { return token_; }
    const std::string& expected() const noexcept { return expected_; }

private:
    int line_;
    int column_;
    std::string token_;
    std::string expected_;
};

class DuplicateName : public InputError {
public:
    explicit DuplicateName(const std::string& name) : InputError("duplicate element name '" + name + "'"), name_(name) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class UnknownNode : public InputError {
public:
    explicit UnknownNode(const std::string& node) : InputError("unknown node '" + node + "'") {}
};

class InvalidParams : public InputError {
public:
    using InputError::InputError;
};

/// A node without any DC path to ground and no capacitor.
class SingularStructure : public InputError {
public:
    explicit SingularStructure(const std::string& node)
        : InputError("node '" + node + "' has no DC path to ground"), node_(node) {}
    const std::string& node() const noexcept { return node_; }

private:
    std::string node_;
};

class NewtonDivergence : public SolverError {
public:
    using SolverError::SolverError;
};

/// No assignment of PTM states is a fixed point of the transition rules.
class NoConsistentState : public SolverError {
public:
    using SolverError::SolverError;
};

class StateChatter : public SolverError {
public:
    using SolverError::SolverError;
};

class StepFailure : public SolverError {
public:
    StepFailure(double time, const std::string& why)
        : SolverError("transient step failed at t=" + std::to_string(time) + " s: " + why), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

class BracketFailure : public SolverError {
public:
    using SolverError::SolverError;
};

class OutOfRange : public SolverError {
public:
    using SolverError::SolverError;
};

class AllSamplesFailed : public SolverError {
public:
    using SolverError::SolverError;
};

}  // namespace ptmsa
