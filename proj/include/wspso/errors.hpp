// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace wspso {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input text (scenario file, JSON payload, ...).
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

/// A named field violates one of its invariants.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& what)
        : Error(what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Query outside the defined domain (out-of-bounds position, bad index).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

/// An operation was called in a state its contract forbids.
class ContractError : public Error {
public:
    explicit ContractError(const std::string& what) : Error(what) {}
};

/// Filesystem-level failure.
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

/// Connection or wire-level failure talking to a peer.
class TransportError : public Error {
public:
    explicit TransportError(const std::string& what) : Error(what) {}
};

/// JSON-RPC error returned by a peer.
class RpcError : public Error {
public:
    RpcError(int code, const std::string& message)
        : Error(message), code_(code) {}
    int code() const noexcept { return code_; }

private:
    int code_;
};

/// Advisor could not produce a usable proposal.
class AdvisorError : public Error {
public:
    explicit AdvisorError(const std::string& what) : Error(what) {}
};

} // namespace wspso
