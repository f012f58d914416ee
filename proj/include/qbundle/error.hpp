#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace qbundle {

enum class ErrorKind {
    // input / parse errors (CLI exit code 1)
    SyntaxError,
    UnknownVariable,
    NonIntegerExponent,
    BadFieldSpec,
    BadFile,
    // precondition violations (CLI exit code 2)
    RingMismatch,
    NotSquare,
    NotAntisymmetric,
    NotDivisible,
    DimensionMismatch,
    NotRegularIsotropic,
    NotIsotropic,
    ZeroForm,
    FormMismatch,
    SizeMismatch,
    NotContained,
    NotInRadical,
    NotContaining,
    ZeroPoint,
    NonPrimitiveFiber,
    OddRank,
    NoValidSign,
    NotIsotropicEverywhere,
    NoUnitPivot,
    NotCoordinate,
    NotHomogeneous,
    DegreeMismatch,
    NotCubic,
    PlaneNotContained,
    SecondPlaneNotContained,
    TooLarge,
    NotSmoothEvenMaximal,
    WrongCorank,
    WrongShape,
    NotEven,
    Unsupported,
    DivisionByZero,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownVariable: return "UnknownVariable";
    case ErrorKind::NonIntegerExponent: return "NonIntegerExponent";
    case ErrorKind::BadFieldSpec: return "BadFieldSpec";
    case ErrorKind::BadFile: return "BadFile";
    case ErrorKind::RingMismatch: return "RingMismatch";
    case ErrorKind::NotSquare: return "NotSquare";
    case ErrorKind::NotAntisymmetric: return "NotAntisymmetric";
    case ErrorKind::NotDivisible: return "NotDivisible";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotRegularIsotropic: return "NotRegularIsotropic";
    case ErrorKind::NotIsotropic: return "NotIsotropic";
    case ErrorKind::ZeroForm: return "ZeroForm";
    case ErrorKind::FormMismatch: return "FormMismatch";
    case ErrorKind::SizeMismatch: return "SizeMismatch";
    case ErrorKind::NotContained: return "NotContained";
    case ErrorKind::NotInRadical: return "NotInRadical";
    case ErrorKind::NotContaining: return "NotContaining";
    case ErrorKind::ZeroPoint: return "ZeroPoint";
    case ErrorKind::NonPrimitiveFiber: return "NonPrimitiveFiber";
    case ErrorKind::OddRank: return "OddRank";
    case ErrorKind::NoValidSign: return "NoValidSign";
    case ErrorKind::NotIsotropicEverywhere: return "NotIsotropicEverywhere";
    case ErrorKind::NoUnitPivot: return "NoUnitPivot";
    case ErrorKind::NotCoordinate: return "NotCoordinate";
    case ErrorKind::NotHomogeneous: return "NotHomogeneous";
    case ErrorKind::DegreeMismatch: return "DegreeMismatch";
    case ErrorKind::NotCubic: return "NotCubic";
    case ErrorKind::PlaneNotContained: return "PlaneNotContained";
    case ErrorKind::SecondPlaneNotContained: return "SecondPlaneNotContained";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::NotSmoothEvenMaximal: return "NotSmoothEvenMaximal";
    case ErrorKind::WrongCorank: return "WrongCorank";
    case ErrorKind::WrongShape: return "WrongShape";
    case ErrorKind::NotEven: return "NotEven";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    }
    return "Unknown";
}

/// True for errors caused by malformed input rather than a violated
/// mathematical precondition.
inline bool is_input_error(ErrorKind k) {
    switch (k) {
    case ErrorKind::SyntaxError:
    case ErrorKind::UnknownVariable:
    case ErrorKind::NonIntegerExponent:
    case ErrorKind::BadFieldSpec:
    case ErrorKind::BadFile:
        return true;
    default:
        return false;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, std::optional<std::size_t> offset = std::nullopt)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what), offset_(offset) {}

    ErrorKind kind() const noexcept { return kind_; }
    /// Message without the kind prefix.
    const std::string& message() const noexcept { return message_; }
    /// Byte offset into the parsed text, for parser errors.
    std::optional<std::size_t> offset() const noexcept { return offset_; }

private:
    ErrorKind kind_;
    std::string message_;
    std::optional<std::size_t> offset_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

} // namespace qbundle
