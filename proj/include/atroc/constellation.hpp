#ifndef ATROC_CONSTELLATION_HPP
#define ATROC_CONSTELLATION_HPP

#include "atroc/rng.hpp"
#include "atroc/types.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace atroc {

/// Square QAM grid parameterized by a single scalar r, the distance between
/// the two corner points of one side. Points are always regenerated from
/// (order, r), never stored externally, so a grid is reproducible bit for bit.
struct Constellation {
    int order = 0;      // u, one of {4, 16, 64, 256}
    double param_r = 0; // r > 0
    SymbolBlock points; // u points, row-major over the grid

    int side() const;
    double spacing() const { return param_r / (side() - 1); }
};

bool is_supported_order(int u);

/// Grid point j (0-based):
///   Re(e_j) = -r/2 + (j mod sqrt(u)) * r / (sqrt(u) - 1)
///   Im(e_j) =  r/2 - floor(j / sqrt(u)) * r / (sqrt(u) - 1)
/// Throws std::invalid_argument for unsupported u or r <= 0.
Constellation build_qam(int u, double r);

/// Nearest grid point in squared Euclidean distance; ties go to the lowest
/// index so the mapping is deterministic everywhere.
struct QuantizedSymbol {
    int index;
    ComplexSymbol point;
};
QuantizedSymbol quantize_symbol(ComplexSymbol z, const Constellation& c);

SymbolBlock quantize_block(const SymbolBlock& z, const Constellation& c);
/// Same, also reporting the chosen grid indices (detection decisions).
SymbolBlock quantize_block(const SymbolBlock& z, const Constellation& c,
                           Eigen::VectorXi& indices);

/// L_Q(z; r) = (1/k) sum_i min_j ||z_i - e_j||_2 (plain, not squared, norm).
double quantization_loss(const SymbolBlock& z, const Constellation& c);

/// Analytic d L_Q / d r with every symbol's nearest-point assignment held
/// fixed (subgradient at ties). Each e_j is linear in r, so de_j/dr = e_j/r.
/// Symbols sitting exactly on their grid point contribute zero.
double quantization_loss_grad_r(const SymbolBlock& z, const Constellation& c);

/// Gradient of L_Q w.r.t. the symbols themselves (assignments fixed),
/// returned in the same complex layout as z. Used when the quantization
/// penalty backpropagates into the encoder.
SymbolBlock quantization_loss_grad_symbols(const SymbolBlock& z,
                                           const Constellation& c);

/// Deterministic source of symbol blocks consumed by fit_constellation.
using SymbolStream = std::function<SymbolBlock()>;

struct ConstellationFitSchedule {
    double lr = 1e-2;          // plain SGD on the scalar r
    double tol = 1e-5;         // |dr| below tol ...
    int patience = 50;         // ... for this many consecutive steps
    int max_steps = 10000;
    int batch_blocks = 64;     // blocks averaged per step
    double r_min = 1e-3;       // divergence guard
    double r_max = 1e3;
};

struct ConstellationFitResult {
    double r_star = 0;
    int steps = 0;
    bool converged = false;      // stopped on the |dr| criterion
    std::vector<double> r_trajectory;    // r after each step
    std::vector<double> loss_trajectory; // batch-mean L_Q before each step
};

/// Gradient descent on the batch-mean quantization loss (the constellation
/// training loop). Throws atroc::NumericalError if r leaves (r_min, r_max).
ConstellationFitResult fit_constellation(const SymbolStream& source, int u,
                                         double r_init,
                                         const ConstellationFitSchedule& sched);

} // namespace atroc

#endif // ATROC_CONSTELLATION_HPP
