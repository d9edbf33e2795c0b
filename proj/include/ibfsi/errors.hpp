#pragma once

#include "ibfsi/geometry.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace ibfsi {

enum class ErrorCode {
    InvalidArgument,
    Config,
    StencilOverflow,
    SolverFailure,
    InvertedElement,
    Mesh,
    Io,
    Internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(ErrorCode::Config, msg) {}
};

class InvalidArgumentError : public Error {
public:
    explicit InvalidArgumentError(const std::string& msg)
        : Error(ErrorCode::InvalidArgument, msg) {}
};

class MeshError : public Error {
public:
    explicit MeshError(const std::string& msg) : Error(ErrorCode::Mesh, msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(ErrorCode::Io, msg) {}
};

/// A Lagrangian point whose kernel stencil does not fit inside the grid's
/// valid (interior + ghost) region.
class StencilOverflowError : public Error {
public:
    StencilOverflowError(const std::string& msg, Vec2 position, long node = -1)
        : Error(ErrorCode::StencilOverflow, msg), position_(position), node_(node) {}
    Vec2 position() const { return position_; }
    long node() const { return node_; }

private:
    Vec2 position_;
    long node_;
};

class SolverFailureError : public Error {
public:
    SolverFailureError(const std::string& msg, std::vector<double> residual_history)
        : Error(ErrorCode::SolverFailure, msg), residuals_(std::move(residual_history)) {}
    const std::vector<double>& residual_history() const { return residuals_; }

private:
    std::vector<double> residuals_;
};

class InvertedElementError : public Error {
public:
    InvertedElementError(const std::string& msg, long element, double jacobian)
        : Error(ErrorCode::InvertedElement, msg), element_(element), jacobian_(jacobian) {}
    long element() const { return element_; }
    double jacobian() const { return jacobian_; }

private:
    long element_;
    double jacobian_;
};

} // namespace ibfsi
