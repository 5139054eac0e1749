#include "ddbst/channel.hpp"

namespace ddbst {

ComplexMatrix channel_apply(const ComplexMatrix& x) {
    check_square_finite(x);
    const Index d = x.rows();
    const double dd = static_cast<double>(d);
    ComplexMatrix out = x;
    const Complex tr = x.trace();
    for (Index k = 0; k < d; ++k) {
        out(k, k) += tr + (dd - 1.0) * x(k, k);
    }
    out /= 2.0 * dd;
    return out;
}

ComplexMatrix channel_apply(const DensityMatrix& rho) {
    return channel_apply(rho.matrix());
}

ComplexMatrix inverse_channel_apply(const ComplexMatrix& x) {
    check_square_finite(x);
    const Index d = x.rows();
    const double dd = static_cast<double>(d);
    const Complex tr = x.trace();
    ComplexMatrix out = 2.0 * dd * x;
    for (Index k = 0; k < d; ++k) {
        out(k, k) -= 2.0 * (dd - 1.0) * x(k, k) + tr / dd;
    }
    return out;
}

ComplexMatrix inverse_snapshot_dense(const SnapshotId& s, Index d) {
    check_dim(d);
    s.validate(d);
    const double dd = static_cast<double>(d);
    ComplexMatrix out = ComplexMatrix::Identity(d, d) * (-1.0 / dd);
    const Index m = s.j;
    const Index n = s.k;
    const Complex i{0.0, 1.0};
    switch (s.kind) {
    case SnapshotKind::Comp:
        out(m, m) += 2.0;
        break;
    case SnapshotKind::RealPlus:
    case SnapshotKind::RealMinus: {
        const double sign = s.kind == SnapshotKind::RealPlus ? 1.0 : -1.0;
        out(m, m) += 1.0;
        out(n, n) += 1.0;
        out(m, n) += sign * dd;
        out(n, m) += sign * dd;
        break;
    }
    case SnapshotKind::ImagPlus:
    case SnapshotKind::ImagMinus: {
        const double sign = s.kind == SnapshotKind::ImagPlus ? 1.0 : -1.0;
        out(m, m) += 1.0;
        out(n, n) += 1.0;
        out(n, m) += sign * dd * i;
        out(m, n) -= sign * dd * i;
        break;
    }
    }
    return out;
}

ObservableEntryAccessor::ObservableEntryAccessor(Index dim, double trace, EntryFn entry)
    : dim_(dim), trace_(trace), trace_over_dim_(trace / static_cast<double>(dim)),
      entry_(std::move(entry)) {
    check_dim(dim_, Index{1} << 40);
    if (!entry_) throw InvalidParameter("observable accessor needs an entry function");
}

ObservableEntryAccessor ObservableEntryAccessor::from_dense(const HermitianObservable& o) {
    return ObservableEntryAccessor(o.dim(), o.trace(),
                                   [o](Index m, Index n) { return o.matrix()(m, n); });
}

SingleShotEstimate single_shot_partial(const SnapshotId& s, const ObservableEntryAccessor& o) {
    const Index d = o.dim();
    s.validate(d);
    SingleShotEstimate out;
    out.snapshot = s;
    if (s.is_comp()) {
        out.value = 2.0 * o.entry(s.j, s.j).real();
        out.ops_count = 1;
        return out;
    }
    const Complex off = o.entry(s.j, s.k);
    const double diag = o.entry(s.j, s.j).real() + o.entry(s.k, s.k).real();
    const double scale = 2.0 * static_cast<double>(d);
    double term = 0.0;
    switch (s.kind) {
    case SnapshotKind::RealPlus: term = scale * off.real(); break;
    case SnapshotKind::RealMinus: term = -scale * off.real(); break;
    case SnapshotKind::ImagPlus: term = -scale * off.imag(); break;
    case SnapshotKind::ImagMinus: term = scale * off.imag(); break;
    default: break;
    }
    out.value = diag + term;
    // diag sum, 2*d, scale*part, final sum
    out.ops_count = 4;
    return out;
}

SingleShotEstimate single_shot_estimate(const SnapshotId& s, const ObservableEntryAccessor& o) {
    SingleShotEstimate out = single_shot_partial(s, o);
    // tr(O)/d is computed once when the accessor is built.
    out.value -= o.trace_over_dim();
    out.ops_count += 1;
    return out;
}

} // namespace ddbst
