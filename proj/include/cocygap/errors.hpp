#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cocygap {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularMatrix : Error {
    using Error::Error;
};

struct EigenSolverFailure : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct GapTooSmall : Error {
    double gap;
    GapTooSmall(double g, const std::string& what) : Error(what), gap(g) {}
};

struct InadmissibleWord : Error {
    using Error::Error;
};

struct NotPrimitive : Error {
    using Error::Error;
};

struct BudgetExceeded : Error {
    std::uint64_t budget;
    BudgetExceeded(std::uint64_t b, const std::string& what) : Error(what), budget(b) {}
};

struct NotInBall : Error {
    int radius;
    NotInBall(int r, const std::string& what) : Error(what), radius(r) {}
};

struct RelationViolated : Error {
    using Error::Error;
};

struct ParseError : Error {
    std::size_t position;
    ParseError(std::size_t pos, const std::string& what)
        : Error(what + " at position " + std::to_string(pos)), position(pos) {}
};

struct ValidationError : Error {
    using Error::Error;
};

}  // namespace cocygap
