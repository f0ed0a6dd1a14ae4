#pragma once

// Complex-matrix kernel and seeded sampling shared by every other module.
// Dense storage and the factorizations themselves come from Eigen; this header
// fixes the conventions (variance split, pivot tolerances, error types) that
// the simulation relies on.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "pilotguard/errors.hpp"

namespace pilotguard {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Reproducible normal/bit source identified by (seed, stream id).
///
/// Streams are move-only so a Monte Carlo worker cannot silently share one
/// with another; every trial constructs its own from a derived stream id.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream),
                          static_cast<std::uint32_t>(stream >> 32), 0x70696c6fU};
        engine_.seed(seq);
    }

    RngStream(const RngStream&) = delete;
    RngStream& operator=(const RngStream&) = delete;
    RngStream(RngStream&&) noexcept = default;
    RngStream& operator=(RngStream&&) noexcept = default;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

    double normal() { return normal_(engine_); }
    std::uint64_t bits() { return engine_(); }
    bool bit() { return (engine_() >> 63) != 0; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Purpose tags for stream-id derivation. A trial's streams differ only in
/// the tag, so arms that share a tag share their draws (common random numbers).
enum class StreamTag : std::uint8_t {
    channel = 1,
    noise = 2,
    attack = 3,
    challenge = 4,
    rate_reference = 5,
};

constexpr std::uint64_t stream_id(StreamTag tag, std::uint64_t index) noexcept {
    constexpr std::uint64_t mask = (std::uint64_t{1} << 56) - 1;
    return (static_cast<std::uint64_t>(tag) << 56) | (index & mask);
}

inline bool all_finite(const ComplexMatrix& a) {
    return a.allFinite();
}

/// Circularly-symmetric complex Gaussian matrix with E|x|^2 = variance per
/// entry. Entries are drawn column-major, real part before imaginary part.
inline ComplexMatrix sample_complex_gaussian(Eigen::Index rows, Eigen::Index cols, double variance,
                                             RngStream& rng) {
    if (!(variance >= 0.0) || !std::isfinite(variance)) {
        throw ParameterError("sample_complex_gaussian: variance must be finite and >= 0, got " +
                             std::to_string(variance));
    }
    if (rows < 0 || cols < 0) {
        throw ParameterError("sample_complex_gaussian: negative dimension");
    }
    ComplexMatrix out(rows, cols);
    const double scale = std::sqrt(variance / 2.0);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double re = rng.normal();
            const double im = rng.normal();
            out(i, j) = Complex(scale * re, scale * im);
        }
    }
    return out;
}

inline double gram_trace(const ComplexMatrix& a) {
    return a.squaredNorm();
}

namespace detail {

inline void require_square(const ComplexMatrix& a, const char* who) {
    if (a.rows() != a.cols()) {
        throw ParameterError(std::string(who) + ": matrix must be square, got " +
                             std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    }
}

} // namespace detail

/// Lower-triangular L with L L^H = A for Hermitian positive semidefinite A.
///
/// Pivots in [-1e-10 * trace(A), 0] are clamped to zero; the matching column
/// below the pivot must then vanish too, otherwise A is indefinite.
inline ComplexMatrix cholesky(const ComplexMatrix& a) {
    detail::require_square(a, "cholesky");
    const Eigen::Index n = a.rows();
    const double scale = std::max(a.norm(), 1.0);
    if ((a - a.adjoint()).norm() > 1e-12 * scale) {
        throw ParameterError("cholesky: matrix is not Hermitian");
    }
    const double trace = std::abs(a.diagonal().real().sum());
    const double tol = 1e-10 * trace;
    const double off_tol = std::sqrt(tol * std::max(trace, 1e-300)) + tol;

    ComplexMatrix l = ComplexMatrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double pivot = a(j, j).real();
        for (Eigen::Index k = 0; k < j; ++k) {
            pivot -= std::norm(l(j, k));
        }
        if (pivot < -tol) {
            throw NotPsdError(static_cast<std::size_t>(j),
                              "cholesky: matrix is not positive semidefinite (pivot " +
                                  std::to_string(j) + " = " + std::to_string(pivot) + ")");
        }
        if (pivot <= tol) {
            for (Eigen::Index i = j + 1; i < n; ++i) {
                Complex residual = a(i, j);
                for (Eigen::Index k = 0; k < j; ++k) {
                    residual -= l(i, k) * std::conj(l(j, k));
                }
                if (std::abs(residual) > off_tol) {
                    throw NotPsdError(static_cast<std::size_t>(j),
                                      "cholesky: zero pivot " + std::to_string(j) +
                                          " with non-zero coupling; matrix is indefinite");
                }
            }
            continue;
        }
        const double ljj = std::sqrt(pivot);
        l(j, j) = ljj;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            Complex sum = a(i, j);
            for (Eigen::Index k = 0; k < j; ++k) {
                sum -= l(i, k) * std::conj(l(j, k));
            }
            l(i, j) = sum / ljj;
        }
    }
    return l;
}

struct SvdResult {
    ComplexMatrix u;
    RealVector singular_values; // descending
    ComplexMatrix v;
};

inline SvdResult svd(const ComplexMatrix& a) {
    Eigen::JacobiSVD<ComplexMatrix> dec(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

/// A^{-1} via partial-pivot LU. Rejects A when its smallest pivot magnitude
/// falls below 1e-12 of its largest.
inline ComplexMatrix inverse(const ComplexMatrix& a) {
    detail::require_square(a, "inverse");
    if (a.rows() == 0) {
        return a;
    }
    Eigen::PartialPivLU<ComplexMatrix> lu(a);
    const RealVector pivots = lu.matrixLU().diagonal().cwiseAbs();
    const double largest = pivots.maxCoeff();
    const double smallest = pivots.minCoeff();
    if (!(largest > 0.0) || smallest < 1e-12 * largest) {
        throw SingularError("inverse: matrix is numerically singular (pivot ratio " +
                            std::to_string(largest > 0.0 ? smallest / largest : 0.0) + ")");
    }
    return lu.inverse();
}

/// Column-major vectorization, matching vec(.) in the channel model.
inline ComplexVector vectorize(const ComplexMatrix& a) {
    return Eigen::Map<const ComplexVector>(a.data(), a.size());
}

inline ComplexMatrix unvectorize(const ComplexVector& v, Eigen::Index rows, Eigen::Index cols) {
    if (v.size() != rows * cols) {
        throw ParameterError("unvectorize: size mismatch");
    }
    return Eigen::Map<const ComplexMatrix>(v.data(), rows, cols);
}

} // namespace pilotguard
