#pragma once

#include <stdexcept>
#include <string>

namespace css {

struct NewtonDiverged : std::runtime_error {
    explicit NewtonDiverged(const std::string& what) : std::runtime_error(what) {}
};

// A Newton iterate left the positive branch (sign change in the profile).
struct OffBranch : std::runtime_error {
    explicit OffBranch(const std::string& what) : std::runtime_error(what) {}
};

struct GridTooCoarse : std::runtime_error {
    explicit GridTooCoarse(const std::string& what) : std::runtime_error(what) {}
};

struct LinearSolveFailed : std::runtime_error {
    explicit LinearSolveFailed(const std::string& what) : std::runtime_error(what) {}
};

// The evolution produced a non-finite value; carries no state by itself, the
// stepper reports the last healthy state alongside.
struct NonFinite : std::runtime_error {
    explicit NonFinite(const std::string& what) : std::runtime_error(what) {}
};

struct BadFieldFile : std::runtime_error {
    explicit BadFieldFile(const std::string& what) : std::runtime_error(what) {}
};

struct EigensolveFailed : std::runtime_error {
    explicit EigensolveFailed(const std::string& what) : std::runtime_error(what) {}
};

// A modulation fit left the trust region around its seed (scale off by more
// than 4x) or its Newton iteration diverged.
struct BasinEscape : std::runtime_error {
    explicit BasinEscape(const std::string& what) : std::runtime_error(what) {}
};

struct BadConfig : std::runtime_error {
    explicit BadConfig(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace css
