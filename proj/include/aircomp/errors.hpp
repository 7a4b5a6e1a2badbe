// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace aircomp {

/// Malformed arguments: non-finite data, dimension mismatch, bad config values.
class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Some effective channel is orthogonal to the decoding vector, so the
/// normalizing factor is zero and the MSE is unbounded.
class DegenerateChannel : public std::domain_error {
public:
    explicit DegenerateChannel(const std::string& what) : std::domain_error(what) {}
};

/// Phase recovery from a homogenized vector whose auxiliary entry vanished.
class RecoveryError : public std::runtime_error {
public:
    explicit RecoveryError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace aircomp
