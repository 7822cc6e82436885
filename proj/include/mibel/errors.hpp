#pragma once

#include <stdexcept>
#include <string>

namespace mibel {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define MIBEL_DEFINE_ERROR(NAME)                                \
    class NAME final : public Error {                           \
    public:                                                     \
        explicit NAME(const std::string& msg) : Error(msg) {}   \
    }

// Curve construction and clearing.
MIBEL_DEFINE_ERROR(EmptyCurve);
MIBEL_DEFINE_ERROR(InvalidSegment);
MIBEL_DEFINE_ERROR(Infeasible);

// Mechanism arithmetic.
MIBEL_DEFINE_ERROR(InvalidMonth);
MIBEL_DEFINE_ERROR(InvalidParams);
MIBEL_DEFINE_ERROR(NoAffectedDemand);
MIBEL_DEFINE_ERROR(InconsistentVolumes);

// Interconnector model.
MIBEL_DEFINE_ERROR(DirectionMismatch);
MIBEL_DEFINE_ERROR(InternalInconsistency);

// Accounting.
MIBEL_DEFINE_ERROR(HourMismatch);

// IO and configuration.
MIBEL_DEFINE_ERROR(ConfigError);
MIBEL_DEFINE_ERROR(IoError);

#undef MIBEL_DEFINE_ERROR

// Dataset parsing failures carry a structured kind so callers and tests can
// distinguish a missing meta row from a malformed number without string
// matching.
class DataError final : public Error {
public:
    enum class Kind {
        missing_meta,
        duplicate_meta,
        bad_number,
        unknown_technology,
        bad_row,
        missing_interconnector,
    };

    DataError(Kind kind, const std::string& msg) : Error(msg), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

}  // namespace mibel
