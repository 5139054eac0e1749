#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <random>

#include <Eigen/Dense>

#include "ddbst/errors.hpp"

namespace ddbst {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Largest dimension accepted by the dense constructors.
inline constexpr Index kMaxDim = 4096;

/// Numerical tolerances shared by every module.
namespace tol {
inline constexpr double kHermitian = 1e-12;
inline constexpr double kTrace = 1e-10;
inline constexpr double kMinEigenvalue = -1e-10;
inline constexpr double kAlgebraic = 1e-10;
inline constexpr double kStatistical = 1e-8;
} // namespace tol

/// Throws DimensionError unless 2 <= d <= max_dim.
void check_dim(Index d, Index max_dim = kMaxDim);

/// Throws unless m is square, at least 2x2, within the cap and finite.
void check_square_finite(const ComplexMatrix& m);

bool is_hermitian(const ComplexMatrix& m, double tolerance = tol::kHermitian);

/// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const ComplexMatrix& m);

/// Brute-force tr(AB) = sum_{j,k} a_jk b_kj.
Complex trace_inner(const ComplexMatrix& a, const ComplexMatrix& b);

/// Seeded pseudo-random source. Streams with the same (seed, stream_id)
/// replay the same draws; different stream ids are decorrelated by
/// splitmix64 mixing before seeding the engine.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on [0, 1).
    double uniform();
    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);
    /// Standard normal (Marsaglia polar method).
    double normal();
    /// Complex Gaussian with independent N(0,1) real and imaginary parts.
    Complex complex_normal() { return {normal(), normal()}; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Deterministic stream id derived from (experiment tag, worker or block index).
std::uint64_t derive_stream_id(std::uint64_t tag, std::uint64_t index);

class HermitianObservable {
public:
    /// Validates Hermiticity to tol::kHermitian; throws InvariantViolation otherwise.
    explicit HermitianObservable(ComplexMatrix m);

    const ComplexMatrix& matrix() const { return *matrix_; }
    Index dim() const { return matrix_->rows(); }
    double trace() const { return trace_; }
    /// tr(O^2), the squared Hilbert-Schmidt norm.
    double hs_norm_sq() const { return hs_norm_sq_; }
    /// tr(O_0^2) with O_0 = O - tr(O) I / d.
    double traceless_hs_norm_sq() const;
    HermitianObservable traceless_part() const;
    HermitianObservable scaled(double c) const;

private:
    std::shared_ptr<const ComplexMatrix> matrix_;
    double trace_ = 0.0;
    double hs_norm_sq_ = 0.0;
};

class DensityMatrix {
public:
    /// Validates Hermiticity, unit trace and min eigenvalue >= -1e-10.
    explicit DensityMatrix(ComplexMatrix m);

    /// |psi><psi| for a unit vector psi.
    static DensityMatrix from_pure(const ComplexVector& psi);
    static DensityMatrix maximally_mixed(Index d);

    const ComplexMatrix& matrix() const { return *matrix_; }
    Index dim() const { return matrix_->rows(); }
    Complex operator()(Index j, Index k) const { return (*matrix_)(j, k); }
    double purity() const;

private:
    struct TrustedPsd {};
    DensityMatrix(ComplexMatrix m, TrustedPsd);

    friend DensityMatrix hs_random_mixed(Index d, RandomStream& rng);
    friend DensityMatrix depolarize(const DensityMatrix& rho, double p);

    std::shared_ptr<const ComplexMatrix> matrix_;
};

/// Haar-random unit vector in C^d.
ComplexVector haar_random_vector(Index d, RandomStream& rng);
DensityMatrix haar_random_pure(Index d, RandomStream& rng);
/// Hilbert-Schmidt random mixed state G G^dagger / tr(G G^dagger).
DensityMatrix hs_random_mixed(Index d, RandomStream& rng);
/// (1 - p) rho + p I / d.
DensityMatrix depolarize(const DensityMatrix& rho, double p);

/// I/d plus Hermitian off-diagonal noise with every |rho_jk| < offdiag_bound.
/// Draws that are not positive semidefinite are rejected and redrawn, up to
/// max_attempts; exhausting the budget throws InvariantViolation.
DensityMatrix make_rho_a(Index d, double offdiag_bound, RandomStream& rng,
                         int max_attempts = 1000);

/// Random Hermitian matrix with Gaussian entries (GUE-like).
ComplexMatrix random_hermitian(Index d, RandomStream& rng);

/// Random Hermitian observable rescaled so that tr(O^2) = hs_norm_sq.
HermitianObservable random_observable(Index d, double hs_norm_sq, RandomStream& rng);

} // namespace ddbst
