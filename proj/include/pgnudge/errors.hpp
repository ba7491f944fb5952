#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pgnudge {

/// Field contains NaN/Inf or has a shape inconsistent with its domain.
class invalid_field_error : public std::runtime_error {
public:
    explicit invalid_field_error(const std::string& what) : std::runtime_error(what) {}
};

/// Linear solver failed to reach its tolerance.
class solver_error : public std::runtime_error {
public:
    solver_error(const std::string& what, double residual, int iterations)
        : std::runtime_error(what), residual(residual), iterations(iterations) {}
    double residual;
    int iterations;
};

/// Advective CFL (or explicit-nudging) limit violated at the current dt.
class step_rejected_error : public std::runtime_error {
public:
    step_rejected_error(const std::string& what, double cfl)
        : std::runtime_error(what), cfl(cfl) {}
    double cfl;
};

/// Too few samples inside a fitting window.
class insufficient_data_error : public std::runtime_error {
public:
    explicit insufficient_data_error(const std::string& what) : std::runtime_error(what) {}
};

/// Aggregated configuration validation failure; messages carry field paths.
class config_error : public std::runtime_error {
public:
    explicit config_error(std::vector<std::string> messages)
        : std::runtime_error(join(messages)), messages(std::move(messages)) {}
    std::vector<std::string> messages;

private:
    static std::string join(const std::vector<std::string>& msgs) {
        std::string out;
        for (const auto& m : msgs) {
            if (!out.empty()) out += "; ";
            out += m;
        }
        return out;
    }
};

}  // namespace pgnudge
