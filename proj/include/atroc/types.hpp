#ifndef ATROC_TYPES_HPP
#define ATROC_TYPES_HPP

#include <Eigen/Dense>

#include <complex>

namespace atroc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using ComplexSymbol = std::complex<double>;

/// A length-k block of complex channel symbols.
using SymbolBlock = Eigen::VectorXcd;

/// Interleaved real view of a symbol block: coordinates (2i, 2i+1) hold the
/// real and imaginary parts of symbol i. This pairing is the contract
/// between the real-valued encoder head and the complex channel.
inline SymbolBlock pack_symbols(const Eigen::Ref<const Vec>& v) {
    SymbolBlock z(v.size() / 2);
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        z[i] = ComplexSymbol(v[2 * i], v[2 * i + 1]);
    }
    return z;
}

inline Vec unpack_symbols(const SymbolBlock& z) {
    Vec v(2 * z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        v[2 * i] = z[i].real();
        v[2 * i + 1] = z[i].imag();
    }
    return v;
}

inline bool all_finite(const Eigen::Ref<const Vec>& v) {
    return v.allFinite();
}

inline bool all_finite(const SymbolBlock& z) {
    return z.real().allFinite() && z.imag().allFinite();
}

} // namespace atroc

#endif // ATROC_TYPES_HPP
