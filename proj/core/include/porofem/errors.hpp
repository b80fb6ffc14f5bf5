#pragma once

#include <stdexcept>
#include <string>

namespace porofem {

struct MeshError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FemError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Quadrature-point admissibility guard tripped (J below the threshold).
struct ElementInversionError : std::runtime_error {
    int cell;
    double jacobian;
    ElementInversionError(int cell_, double j_)
        : std::runtime_error("element inversion in cell " + std::to_string(cell_) +
                             " (J = " + std::to_string(j_) + ")"),
          cell(cell_),
          jacobian(j_) {}
};

struct NonInvertibleDeformationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularMatrixError : std::runtime_error {
    // First failing pivot row, or -1 when the factorization backend does not
    // expose it; maps back to a DOF for diagnostics.
    int pivot_row;
    SingularMatrixError(const std::string &what_, int row)
        : std::runtime_error(what_), pivot_row(row) {}
};

struct ConfigError : std::runtime_error {
    int line;  // 1-based line number, 0 when not tied to a line
    ConfigError(const std::string &what_, int line_ = 0)
        : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + what_
                                       : what_),
          line(line_) {}
};

}  // namespace porofem
