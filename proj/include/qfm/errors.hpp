// Copyright (c) 2026 the qfm authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace qfm {

/// Invalid argument value (negative sigma, bad range, ...).
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Operands have incompatible dimensions.
class ShapeError : public std::invalid_argument {
public:
    explicit ShapeError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// File or stream could not be read/written/parsed.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A numerical process produced a non-finite state.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& msg, long where)
        : std::runtime_error(msg), index(where) {}
    /// Step or epoch at which divergence was detected.
    long index;
};

} // namespace qfm
