#pragma once

#include <stdexcept>
#include <string>

namespace botscope {

struct BadMagic : std::runtime_error {
    explicit BadMagic(const std::string& what) : std::runtime_error(what) {}
};

struct TruncatedCapture : std::runtime_error {
    explicit TruncatedCapture(const std::string& what) : std::runtime_error(what) {}
};

struct Unreadable : std::runtime_error {
    explicit Unreadable(const std::string& what) : std::runtime_error(what) {}
};

struct Unwritable : std::runtime_error {
    explicit Unwritable(const std::string& what) : std::runtime_error(what) {}
};

struct LengthMismatch : std::runtime_error {
    explicit LengthMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct TooManyFlows : std::runtime_error {
    explicit TooManyFlows(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyDataset : std::runtime_error {
    explicit EmptyDataset(const std::string& what) : std::runtime_error(what) {}
};

struct KTooLarge : std::runtime_error {
    explicit KTooLarge(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownFlowId : std::runtime_error {
    explicit UnknownFlowId(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidConfig : std::runtime_error {
    explicit InvalidConfig(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace botscope
