#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cce {

enum class ErrorKind {
    InvalidParameter,
    Domain,
    BranchViolation,
    NonConvergence,
    SingularJacobian,
    PositivityLoss,
    StepCollapse,
    UnsupportedOrder,
    DegenerateIndex,
    InsufficientResolution,
    InvalidClass,
    InvalidComparison,
    Io
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::BranchViolation: return "branch-violation";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::SingularJacobian: return "singular-jacobian";
    case ErrorKind::PositivityLoss: return "positivity-loss";
    case ErrorKind::StepCollapse: return "step-collapse";
    case ErrorKind::UnsupportedOrder: return "unsupported-order";
    case ErrorKind::DegenerateIndex: return "degenerate-index";
    case ErrorKind::InsufficientResolution: return "insufficient-resolution";
    case ErrorKind::InvalidClass: return "invalid-class";
    case ErrorKind::InvalidComparison: return "invalid-comparison";
    case ErrorKind::Io: return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, std::vector<double> history)
        : Error(ErrorKind::NonConvergence, what), history(std::move(history)) {}
    std::vector<double> history;
};

class SingularJacobian : public Error {
public:
    // node: mesh interval owning the failed pivot row (-1 for boundary rows)
    SingularJacobian(const std::string& what, int node, int pivot_row, double pivot)
        : Error(ErrorKind::SingularJacobian, what), node(node), pivot_row(pivot_row), pivot(pivot) {}
    int node;
    int pivot_row;
    double pivot;
};

class PositivityLoss : public Error {
public:
    PositivityLoss(const std::string& what, int node)
        : Error(ErrorKind::PositivityLoss, what), node(node) {}
    int node;
};

class DegenerateIndex : public Error {
public:
    DegenerateIndex(const std::string& what, int order)
        : Error(ErrorKind::DegenerateIndex, what), order(order) {}
    int order;
};

} // namespace cce
