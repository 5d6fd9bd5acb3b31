#include "atroc/constellation.hpp"

#include "atroc/errors.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace atroc {

bool is_supported_order(int u) {
    return u == 4 || u == 16 || u == 64 || u == 256;
}

int Constellation::side() const {
    int s = 1;
    while (s * s < order) ++s;
    return s;
}

Constellation build_qam(int u, double r) {
    if (!is_supported_order(u)) {
        throw std::invalid_argument("build_qam: order must be one of {4, 16, 64, 256}");
    }
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw std::invalid_argument("build_qam: r must be positive and finite");
    }
    Constellation c;
    c.order = u;
    c.param_r = r;
    c.points.resize(u);
    const int side = c.side();
    const double step = r / (side - 1);
    for (int j = 0; j < u; ++j) {
        const double re = -r / 2 + (j % side) * step;
        const double im = r / 2 - (j / side) * step;
        c.points[j] = ComplexSymbol(re, im);
    }
    return c;
}

QuantizedSymbol quantize_symbol(ComplexSymbol z, const Constellation& c) {
    int best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (int j = 0; j < c.order; ++j) {
        const double d2 = std::norm(z - c.points[j]);
        if (d2 < best_d2) { // strict: ties keep the lowest index
            best_d2 = d2;
            best = j;
        }
    }
    return {best, c.points[best]};
}

SymbolBlock quantize_block(const SymbolBlock& z, const Constellation& c) {
    SymbolBlock out(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        out[i] = quantize_symbol(z[i], c).point;
    }
    return out;
}

SymbolBlock quantize_block(const SymbolBlock& z, const Constellation& c,
                           Eigen::VectorXi& indices) {
    SymbolBlock out(z.size());
    indices.resize(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const QuantizedSymbol q = quantize_symbol(z[i], c);
        out[i] = q.point;
        indices[i] = q.index;
    }
    return out;
}

double quantization_loss(const SymbolBlock& z, const Constellation& c) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        sum += std::abs(z[i] - quantize_symbol(z[i], c).point);
    }
    return sum / static_cast<double>(z.size());
}

double quantization_loss_grad_r(const SymbolBlock& z, const Constellation& c) {
    // d||z - e||/dr = <e - z, e/r> / ||z - e||, with <.,.> the real inner
    // product on (re, im). Zero-distance symbols contribute 0.
    double sum = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const ComplexSymbol e = quantize_symbol(z[i], c).point;
        const ComplexSymbol diff = e - z[i];
        const double dist = std::abs(diff);
        if (dist == 0.0) continue;
        const double inner = diff.real() * e.real() + diff.imag() * e.imag();
        sum += inner / (c.param_r * dist);
    }
    return sum / static_cast<double>(z.size());
}

SymbolBlock quantization_loss_grad_symbols(const SymbolBlock& z,
                                           const Constellation& c) {
    SymbolBlock grad(z.size());
    const double inv_k = 1.0 / static_cast<double>(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const ComplexSymbol e = quantize_symbol(z[i], c).point;
        const ComplexSymbol diff = z[i] - e;
        const double dist = std::abs(diff);
        grad[i] = dist == 0.0 ? ComplexSymbol(0, 0) : diff * (inv_k / dist);
    }
    return grad;
}

ConstellationFitResult fit_constellation(const SymbolStream& source, int u,
                                         double r_init,
                                         const ConstellationFitSchedule& sched) {
    if (!(r_init > 0.0)) {
        throw std::invalid_argument("fit_constellation: r_init must be positive");
    }
    ConstellationFitResult res;
    res.r_trajectory.reserve(sched.max_steps);
    res.loss_trajectory.reserve(sched.max_steps);

    double r = r_init;
    int small_steps = 0;
    for (int step = 0; step < sched.max_steps; ++step) {
        const Constellation c = build_qam(u, r);
        double loss = 0.0;
        double grad = 0.0;
        for (int b = 0; b < sched.batch_blocks; ++b) {
            const SymbolBlock block = source();
            loss += quantization_loss(block, c);
            grad += quantization_loss_grad_r(block, c);
        }
        loss /= sched.batch_blocks;
        grad /= sched.batch_blocks;

        const double dr = -sched.lr * grad;
        r += dr;
        res.r_trajectory.push_back(r);
        res.loss_trajectory.push_back(loss);
        res.steps = step + 1;

        if (!(r > sched.r_min && r < sched.r_max)) {
            throw NumericalError("fit_constellation: r diverged out of (" +
                                 std::to_string(sched.r_min) + ", " +
                                 std::to_string(sched.r_max) + ")");
        }
        small_steps = std::abs(dr) < sched.tol ? small_steps + 1 : 0;
        if (small_steps >= sched.patience) {
            res.converged = true;
            break;
        }
    }
    res.r_star = r;
    return res;
}

} // namespace atroc
