#include "ddbst/linalg.hpp"

#include <cmath>
#include <string>

namespace ddbst {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream_id) {
    std::uint64_t state = seed ^ splitmix64(stream_id);
    std::uint32_t words[8];
    for (int i = 0; i < 4; ++i) {
        std::uint64_t v = splitmix64(state);
        words[2 * i] = static_cast<std::uint32_t>(v);
        words[2 * i + 1] = static_cast<std::uint32_t>(v >> 32);
    }
    std::seed_seq seq(std::begin(words), std::end(words));
    return std::mt19937_64(seq);
}

} // namespace

void check_dim(Index d, Index max_dim) {
    if (d < 2) {
        throw DimensionError("dimension must be at least 2, got " + std::to_string(d));
    }
    if (d > max_dim) {
        throw DimensionError("dimension " + std::to_string(d) + " exceeds the cap " +
                             std::to_string(max_dim));
    }
}

void check_square_finite(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) {
        throw DimensionError("matrix is not square (" + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + ")");
    }
    check_dim(m.rows());
    if (!m.allFinite()) {
        throw InvariantViolation("matrix has non-finite entries");
    }
}

bool is_hermitian(const ComplexMatrix& m, double tolerance) {
    if (m.rows() != m.cols()) return false;
    const Index d = m.rows();
    for (Index j = 0; j < d; ++j) {
        for (Index k = j; k < d; ++k) {
            if (std::abs(m(j, k) - std::conj(m(k, j))) > tolerance) return false;
        }
    }
    return true;
}

double min_eigenvalue(const ComplexMatrix& m) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

Complex trace_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
        throw DimensionError("trace_inner: incompatible operands");
    }
    const Index d = a.rows();
    Complex sum{0.0, 0.0};
    for (Index j = 0; j < d; ++j) {
        for (Index k = 0; k < d; ++k) {
            sum += a(j, k) * b(k, j);
        }
    }
    return sum;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(seeded_engine(seed, stream_id)) {}

double RandomStream::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomStream::below(std::uint64_t n) {
    if (n == 0) throw InvalidParameter("RandomStream::below: n must be positive");
    // Lemire's nearly-divisionless bounded integer.
    unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            m = static_cast<unsigned __int128>(engine_()) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double RandomStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
}

std::uint64_t derive_stream_id(std::uint64_t tag, std::uint64_t index) {
    std::uint64_t state = tag * 0x100000001b3ULL + index;
    return splitmix64(state);
}

// ---------------------------------------------------------------------------

HermitianObservable::HermitianObservable(ComplexMatrix m) {
    check_square_finite(m);
    if (!is_hermitian(m)) {
        throw InvariantViolation("observable is not Hermitian");
    }
    trace_ = m.trace().real();
    hs_norm_sq_ = m.squaredNorm();
    matrix_ = std::make_shared<const ComplexMatrix>(std::move(m));
}

double HermitianObservable::traceless_hs_norm_sq() const {
    const double d = static_cast<double>(dim());
    return std::max(0.0, hs_norm_sq_ - trace_ * trace_ / d);
}

HermitianObservable HermitianObservable::traceless_part() const {
    ComplexMatrix m = *matrix_;
    const double shift = trace_ / static_cast<double>(dim());
    m.diagonal().array() -= shift;
    return HermitianObservable(std::move(m));
}

HermitianObservable HermitianObservable::scaled(double c) const {
    return HermitianObservable(c * (*matrix_));
}

DensityMatrix::DensityMatrix(ComplexMatrix m) {
    check_square_finite(m);
    if (!is_hermitian(m)) {
        throw InvariantViolation("density matrix is not Hermitian");
    }
    const Complex tr = m.trace();
    if (std::abs(tr - Complex{1.0, 0.0}) > tol::kTrace) {
        throw InvariantViolation("density matrix trace is not 1");
    }
    const double lo = min_eigenvalue(m);
    if (lo < tol::kMinEigenvalue) {
        throw InvariantViolation("density matrix is not positive semidefinite (min eigenvalue " +
                                 std::to_string(lo) + ")");
    }
    matrix_ = std::make_shared<const ComplexMatrix>(std::move(m));
}

DensityMatrix::DensityMatrix(ComplexMatrix m, TrustedPsd) {
    check_square_finite(m);
    if (!is_hermitian(m) || std::abs(m.trace() - Complex{1.0, 0.0}) > tol::kTrace) {
        throw InvariantViolation("density matrix construction lost Hermiticity or unit trace");
    }
    matrix_ = std::make_shared<const ComplexMatrix>(std::move(m));
}

DensityMatrix DensityMatrix::from_pure(const ComplexVector& psi) {
    if (std::abs(psi.squaredNorm() - 1.0) > tol::kTrace) {
        throw InvariantViolation("pure state vector is not normalized");
    }
    ComplexMatrix m = psi * psi.adjoint();
    // Exact Hermitian symmetrization of the rank-one product.
    m = 0.5 * (m + m.adjoint()).eval();
    return DensityMatrix(std::move(m), TrustedPsd{});
}

DensityMatrix DensityMatrix::maximally_mixed(Index d) {
    check_dim(d);
    ComplexMatrix m = ComplexMatrix::Identity(d, d) / static_cast<double>(d);
    return DensityMatrix(std::move(m), TrustedPsd{});
}

double DensityMatrix::purity() const {
    return matrix_->squaredNorm();
}

ComplexVector haar_random_vector(Index d, RandomStream& rng) {
    check_dim(d);
    // The first column of a Haar unitary is a normalized complex Gaussian
    // vector; the global phase is irrelevant for the projector.
    ComplexVector v(d);
    for (Index i = 0; i < d; ++i) v(i) = rng.complex_normal();
    v /= v.norm();
    return v;
}

DensityMatrix haar_random_pure(Index d, RandomStream& rng) {
    return DensityMatrix::from_pure(haar_random_vector(d, rng));
}

DensityMatrix hs_random_mixed(Index d, RandomStream& rng) {
    check_dim(d);
    ComplexMatrix g(d, d);
    for (Index j = 0; j < d; ++j) {
        for (Index k = 0; k < d; ++k) g(j, k) = rng.complex_normal();
    }
    ComplexMatrix m = g * g.adjoint();
    m = 0.5 * (m + m.adjoint()).eval();
    m /= m.trace().real();
    return DensityMatrix(std::move(m), DensityMatrix::TrustedPsd{});
}

DensityMatrix depolarize(const DensityMatrix& rho, double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw InvalidParameter("depolarizing probability must lie in [0, 1]");
    }
    const Index d = rho.dim();
    ComplexMatrix m = (1.0 - p) * rho.matrix();
    m.diagonal().array() += p / static_cast<double>(d);
    return DensityMatrix(std::move(m), DensityMatrix::TrustedPsd{});
}

DensityMatrix make_rho_a(Index d, double offdiag_bound, RandomStream& rng, int max_attempts) {
    check_dim(d);
    if (!(offdiag_bound >= 0.0) || !std::isfinite(offdiag_bound)) {
        throw InvalidParameter("off-diagonal bound must be a finite non-negative number");
    }
    if (max_attempts < 1) throw InvalidParameter("max_attempts must be positive");
    const double diag = 1.0 / static_cast<double>(d);
    if (offdiag_bound == 0.0) return DensityMatrix::maximally_mixed(d);

    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        ComplexMatrix m = ComplexMatrix::Zero(d, d);
        for (Index j = 0; j < d; ++j) {
            m(j, j) = diag;
            for (Index k = j + 1; k < d; ++k) {
                // uniform() < 1 keeps the magnitude strictly below the bound.
                const double magnitude = offdiag_bound * rng.uniform();
                const double phase = 2.0 * M_PI * rng.uniform();
                m(j, k) = std::polar(magnitude, phase);
                m(k, j) = std::conj(m(j, k));
            }
        }
        if (min_eigenvalue(m) >= tol::kMinEigenvalue) {
            return DensityMatrix(std::move(m));
        }
    }
    throw InvariantViolation("make_rho_a: no positive semidefinite draw after " +
                             std::to_string(max_attempts) + " attempts; lower the bound");
}

ComplexMatrix random_hermitian(Index d, RandomStream& rng) {
    check_dim(d);
    ComplexMatrix m(d, d);
    for (Index j = 0; j < d; ++j) {
        m(j, j) = rng.normal();
        for (Index k = j + 1; k < d; ++k) {
            m(j, k) = rng.complex_normal() / std::sqrt(2.0);
            m(k, j) = std::conj(m(j, k));
        }
    }
    return m;
}

HermitianObservable random_observable(Index d, double hs_norm_sq, RandomStream& rng) {
    if (!(hs_norm_sq >= 0.0)) throw InvalidParameter("hs_norm_sq must be non-negative");
    ComplexMatrix m = random_hermitian(d, rng);
    m *= std::sqrt(hs_norm_sq / m.squaredNorm());
    return HermitianObservable(std::move(m));
}

} // namespace ddbst
