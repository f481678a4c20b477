#pragma once

#include <stdexcept>
#include <string>

namespace excut {

enum class errc {
    asymmetric_law,
    degenerate_law,
    invalid_parameter,
    index_out_of_range,
    dimension_mismatch,
    unsupported_size,
    threshold_below_floor,
    cap_exceeded,
    budget_exceeded,
    config_error,
    io_error,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::asymmetric_law: return "AsymmetricLaw";
        case errc::degenerate_law: return "DegenerateLaw";
        case errc::invalid_parameter: return "InvalidParameter";
        case errc::index_out_of_range: return "IndexOutOfRange";
        case errc::dimension_mismatch: return "DimensionMismatch";
        case errc::unsupported_size: return "UnsupportedSize";
        case errc::threshold_below_floor: return "ThresholdBelowFloor";
        case errc::cap_exceeded: return "CapExceeded";
        case errc::budget_exceeded: return "BudgetExceeded";
        case errc::config_error: return "ConfigError";
        case errc::io_error: return "IoError";
    }
    return "UnknownError";
}

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

}  // namespace excut
