#pragma once

#include <stdexcept>
#include <string>

namespace coordnet {

/// Invalid configuration (bad config file, bad flag value, impossible scenario).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Unreadable input or unwritable output.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// A caller violated an operation's precondition (e.g. unsorted share list).
class ContractError : public std::logic_error {
public:
    explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

/// Threshold estimation had no usable data; callers should fall back to the
/// fixed default window.
class EstimationError : public std::runtime_error {
public:
    explicit EstimationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace coordnet
