#include "ddbst/variance.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "ddbst/ensemble.hpp"
#include "ddbst/io.hpp"

namespace ddbst {

namespace {

void check_same_dim(const DensityMatrix& sigma, const HermitianObservable& o) {
    if (sigma.dim() != o.dim()) throw DimensionError("state and observable dimensions differ");
}

bool is_maximally_mixed(const DensityMatrix& rho) {
    const Index d = rho.dim();
    const double target = 1.0 / static_cast<double>(d);
    for (Index j = 0; j < d; ++j) {
        for (Index k = 0; k < d; ++k) {
            const Complex want = j == k ? Complex{target, 0.0} : Complex{0.0, 0.0};
            if (std::abs(rho(j, k) - want) > tol::kHermitian) return false;
        }
    }
    return true;
}

double traceless_mean(const DensityMatrix& sigma, const HermitianObservable& o) {
    const double d = static_cast<double>(o.dim());
    return trace_inner(sigma.matrix(), o.matrix()).real() - o.trace() / d;
}

} // namespace

OOperator o_operator(const HermitianObservable& o) {
    const Index d = o.dim();
    const double dd = static_cast<double>(d);
    ComplexMatrix m = o.matrix();
    const double shift = o.trace() / dd;
    for (Index k = 0; k < d; ++k) {
        m(k, k) = (m(k, k).real() - shift) / dd;
    }
    return {std::move(m)};
}

double v_diag(const DensityMatrix& sigma, const HermitianObservable& o) {
    check_same_dim(sigma, o);
    const Index d = o.dim();
    const ComplexMatrix om = o_operator(o).matrix;
    const ComplexMatrix& s = sigma.matrix();
    Complex sum{0.0, 0.0};
    for (Index j = 0; j < d; ++j) {
        for (Index k = j + 1; k < d; ++k) {
            const Complex sd = s(j, j) + s(k, k);
            const Complex od = om(j, j) + om(k, k);
            sum += sd * od * od + (s(j, k) + s(k, j)) * od * (om(j, k) + om(k, j)) -
                   (s(j, k) - s(k, j)) * od * (om(j, k) - om(k, j)) +
                   2.0 * sd * om(j, k) * om(k, j);
        }
    }
    return static_cast<double>(d) * sum.real();
}

VarianceReport variance_exact(const DensityMatrix& sigma, const HermitianObservable& o,
                              VarianceMethod method) {
    check_same_dim(sigma, o);
    const Index d = o.dim();
    const double dd = static_cast<double>(d);
    const OOperator oo = o_operator(o);
    VarianceReport rep;

    if (method == VarianceMethod::ClosedForm) {
        double diag = 0.0;
        for (Index k = 0; k < d; ++k) {
            const double okk = oo.matrix(k, k).real();
            diag += sigma(k, k).real() * okk * okk;
        }
        rep.diag_term = 4.0 * dd * diag;
        rep.v_diag = v_diag(sigma, o);
    } else {
        // Each snapshot s contributes P(s | sigma) * tr^2(M^{-1}(O_0) s)
        // with M^{-1}(O_0) = 2d o.
        const double w = 1.0 / (2.0 * dd);
        for (const auto& s : enumerate_snapshots(d)) {
            const double p = (s.is_comp() ? 2.0 * w : w) * snapshot_overlap(sigma, s);
            const double x = 2.0 * dd * snapshot_trace(oo.matrix, s).real();
            (s.is_comp() ? rep.diag_term : rep.v_diag) += p * x * x;
        }
    }
    rep.variance_exact = rep.diag_term + rep.v_diag;
    const double t0 = o.traceless_hs_norm_sq();
    rep.worst_bound = 2.0 * dd * t0;
    rep.avg_bound = 2.0 * t0;
    rep.traceless_mean = traceless_mean(sigma, o);
    return rep;
}

double bound_t(const OOperator& o) {
    const Index d = o.matrix.rows();
    double t = 0.0;
    for (Index k = 0; k < d; ++k) {
        const double okk = o.matrix(k, k).real();
        t += 2.0 * okk * okk;
    }
    for (Index j = 0; j < d; ++j) {
        for (Index k = j + 1; k < d; ++k) {
            const double od = o.matrix(j, j).real() + o.matrix(k, k).real();
            t += od * od + 2.0 * (o.matrix(j, k) * o.matrix(k, j)).real();
        }
    }
    return t;
}

double mub_average_variance(const HermitianObservable& o) {
    return (1.0 + 1.0 / static_cast<double>(o.dim())) * o.traceless_hs_norm_sq();
}

BoundAudit check_bounds(const HermitianObservable& o, std::span<const DensityMatrix> states,
                        std::span<const std::string> ids) {
    if (!ids.empty() && ids.size() != states.size()) {
        throw InvalidParameter("check_bounds: ids and states differ in length");
    }
    BoundAudit audit;
    audit.traceless_hs_norm_sq = o.traceless_hs_norm_sq();
    audit.mub_average_constant = mub_average_variance(o);
    // Absolute slack for floating-point accumulation in the bound checks.
    constexpr double kSlack = 1e-8;

    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto& sigma = states[i];
        const VarianceReport rep = variance_exact(sigma, o);
        BoundAuditRow row;
        row.state_id = ids.empty() ? "state_" + std::to_string(i) : ids[i];
        row.variance_exact = rep.variance_exact;
        row.v_diag = rep.v_diag;
        row.worst_bound = rep.worst_bound;
        row.avg_bound = rep.avg_bound;
        row.ratio = audit.traceless_hs_norm_sq > 0.0 ? rep.variance_exact / audit.traceless_hs_norm_sq
                                                     : 0.0;
        row.maximally_mixed = is_maximally_mixed(sigma);

        if (rep.variance_exact > rep.worst_bound + kSlack) {
            throw BoundViolation("worst-case bound 2d tr(O_0^2) violated by " + row.state_id,
                                 density_to_json(sigma).dump());
        }
        if (row.maximally_mixed && rep.variance_exact > rep.avg_bound + kSlack) {
            throw BoundViolation("average bound 2 tr(O_0^2) violated by " + row.state_id,
                                 density_to_json(sigma).dump());
        }
        audit.rows.push_back(std::move(row));
    }
    return audit;
}

std::string bound_audit_csv(const BoundAudit& audit, const std::string& comment) {
    std::ostringstream os;
    if (!comment.empty()) os << "# " << comment << '\n';
    os << "state_id,variance_exact,v_diag,worst_bound,avg_bound,ratio\n";
    os << std::setprecision(17);
    for (const auto& r : audit.rows) {
        os << r.state_id << ',' << r.variance_exact << ',' << r.v_diag << ',' << r.worst_bound << ','
           << r.avg_bound << ',' << r.ratio << '\n';
    }
    return os.str();
}

} // namespace ddbst
