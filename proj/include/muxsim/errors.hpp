#pragma once

#include <stdexcept>
#include <string>

namespace muxsim {

/// Process exit codes used by the CLI. Library errors carry the code they
/// should map to so tools/ stays a thin shell.
enum class ExitCode : int {
    ok = 0,
    config = 2,   // schema / parse / argument problems
    physics = 3,  // slip, travel limit, budget, planning faults
    fit = 4,      // calibration failures
};

class Error : public std::runtime_error {
public:
    Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    [[nodiscard]] ExitCode exit_code() const { return code_; }

private:
    ExitCode code_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ExitCode::config, what) {}
};

struct PhysicsError : Error {
    explicit PhysicsError(const std::string& what) : Error(ExitCode::physics, what) {}
};

struct PlanError : Error {
    explicit PlanError(const std::string& what) : Error(ExitCode::physics, what) {}
};

struct FitError : Error {
    explicit FitError(const std::string& what) : Error(ExitCode::fit, what) {}
};

}  // namespace muxsim
