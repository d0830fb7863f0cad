#pragma once

#include <stdexcept>
#include <string>

namespace bmc {

struct DegenerateMarginal : std::runtime_error {
    explicit DegenerateMarginal(const std::string& what) : std::runtime_error(what) {}
};

struct NonUniqueMinimizer : std::runtime_error {
    explicit NonUniqueMinimizer(const std::string& what) : std::runtime_error(what) {}
};

struct DeterminantNonPositive : std::runtime_error {
    explicit DeterminantNonPositive(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidGrid : std::runtime_error {
    explicit InvalidGrid(const std::string& what) : std::runtime_error(what) {}
};

struct SizeExceeded : std::runtime_error {
    explicit SizeExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace bmc
