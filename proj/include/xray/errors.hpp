#pragma once

#include <stdexcept>
#include <string>

namespace xray {

struct EmptyPlacement : std::runtime_error {
    explicit EmptyPlacement(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownId : std::runtime_error {
    explicit UnknownId(int id)
        : std::runtime_error("unknown object id " + std::to_string(id)) {}
};

struct NoTarget : std::runtime_error {
    NoTarget() : std::runtime_error("scene has no target instance") {}
};

struct DimensionMismatch : std::runtime_error {
    explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace xray
