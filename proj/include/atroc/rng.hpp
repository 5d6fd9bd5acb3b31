#ifndef ATROC_RNG_HPP
#define ATROC_RNG_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>

namespace atroc {

/// Derives an independent stream seed from a base seed and a stream id
/// (splitmix64 finalizer). Streams with distinct ids are decorrelated.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream_id) {
    std::uint64_t x = base + 0x9E3779B97F4A7C15ULL * (stream_id + 1);
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

/// Seeded random stream with explicitly specified sampling algorithms.
/// std::normal_distribution is implementation-defined, so normals come from
/// Box-Muller over raw 53-bit uniforms: the same seed produces the same
/// draws on every platform. The engine is the whole state (no cached spare),
/// which keeps serialization trivial.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform draw in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// One Box-Muller pair of independent N(0,1) draws.
    void normal_pair(double& a, double& b) {
        const double u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log1p(-u1));
        const double angle = 2.0 * M_PI * u2;
        a = radius * std::cos(angle);
        b = radius * std::sin(angle);
    }

    /// Single N(0,1) draw (second half of the pair is discarded).
    double normal() {
        double a, b;
        normal_pair(a, b);
        return a;
    }

    /// Circularly-symmetric complex Gaussian with total variance
    /// `variance` (variance/2 per real component).
    std::complex<double> complex_normal(double variance) {
        double a, b;
        normal_pair(a, b);
        const double s = std::sqrt(0.5 * variance);
        return {s * a, s * b};
    }

    /// Fills `out` with i.i.d. N(0,1) draws, consuming ceil(n/2) pairs.
    void fill_normal(Eigen::Ref<Eigen::VectorXd> out) {
        const Eigen::Index n = out.size();
        Eigen::Index i = 0;
        for (; i + 1 < n; i += 2) normal_pair(out[i], out[i + 1]);
        if (i < n) out[i] = normal();
    }

    /// Uniform draw in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t raw() { return engine_(); }

    void save(std::ostream& os) const { os << engine_; }
    void load(std::istream& is) { is >> engine_; }

    friend bool operator==(const RandomStream& a, const RandomStream& b) {
        return a.engine_ == b.engine_;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace atroc

#endif // ATROC_RNG_HPP
