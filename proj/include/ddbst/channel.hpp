#pragma once

#include <functional>

#include "ddbst/ensemble.hpp"
#include "ddbst/linalg.hpp"

namespace ddbst {

/// M(X) = (1/2d) [X + tr(X) I + (d-1) diag(X)], the DDB measurement channel.
ComplexMatrix channel_apply(const ComplexMatrix& x);
ComplexMatrix channel_apply(const DensityMatrix& rho);

/// M^{-1}(X) = 2d [X - ((d-1)/d) diag(X)] - tr(X)/d I.
ComplexMatrix inverse_channel_apply(const ComplexMatrix& x);

/// M^{-1}(|s><s|) in dense form. Testing aid; the estimator never builds it.
ComplexMatrix inverse_snapshot_dense(const SnapshotId& s, Index d);

/// O(1) entry access to an observable with known trace. Callers may wrap
/// a dense matrix or a function that computes entries on demand.
class ObservableEntryAccessor {
public:
    using EntryFn = std::function<Complex(Index, Index)>;

    ObservableEntryAccessor(Index dim, double trace, EntryFn entry);

    /// Wraps a dense observable; Hermiticity and the trace were checked by
    /// HermitianObservable itself.
    static ObservableEntryAccessor from_dense(const HermitianObservable& o);

    Index dim() const { return dim_; }
    double trace() const { return trace_; }
    double trace_over_dim() const { return trace_over_dim_; }
    Complex entry(Index m, Index n) const { return entry_(m, n); }

private:
    Index dim_;
    double trace_;
    double trace_over_dim_;
    EntryFn entry_;
};

struct SingleShotEstimate {
    double value = 0.0;
    SnapshotId snapshot;
    /// Arithmetic operations spent on this shot.
    int ops_count = 0;
};

/// tr(M^{-1}(s) O) from at most three entries of O:
///   Comp(t)          2 O_tt - tr(O)/d
///   RealPlus/Minus   O_mm + O_nn +- 2d Re(O_mn) - tr(O)/d
///   ImagPlus/Minus   O_mm + O_nn -+ 2d Im(O_mn) - tr(O)/d
SingleShotEstimate single_shot_estimate(const SnapshotId& s, const ObservableEntryAccessor& o);

/// The same value without the trailing -tr(O)/d, i.e. tr((M^{-1}(s) + I/d) O).
/// This is the form used when tr(O)/d is applied once at the end, or when the
/// trace of the observable is not available (stabilizer block estimation).
SingleShotEstimate single_shot_partial(const SnapshotId& s, const ObservableEntryAccessor& o);

} // namespace ddbst
