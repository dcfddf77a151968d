#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cemech/estimate.hpp"

namespace cemech {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double max_lambda = 1e32;

struct Evaluator {
    const NllsProblem& problem;
    std::vector<double> typical;
    int evaluations = 0;

    bool residuals(const VectorXd& p, VectorXd& r)
    {
        r.resize(static_cast<Eigen::Index>(problem.n_residuals));
        problem.residuals({p.data(), static_cast<std::size_t>(p.size())},
                          {r.data(), static_cast<std::size_t>(r.size())});
        ++evaluations;
        return r.allFinite();
    }

    bool jacobian(const VectorXd& p, MatrixXd& jac)
    {
        const auto n = p.size();
        jac.resize(static_cast<Eigen::Index>(problem.n_residuals), n);
        VectorXd plus, minus;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double h = 1e-6 * std::max(std::abs(p[j]), typical[static_cast<std::size_t>(j)]);
            VectorXd q = p;
            q[j] = p[j] + h;
            const double hp = q[j] - p[j];
            if (!residuals(q, plus)) {
                return false;
            }
            q[j] = p[j] - h;
            const double hm = p[j] - q[j];
            if (!residuals(q, minus)) {
                return false;
            }
            jac.col(j) = (plus - minus) / (hp + hm);
        }
        return jac.allFinite();
    }
};

/// Names of columns that fall outside the numerical rank of J.
std::vector<std::string> unidentifiable(const MatrixXd& jac, const std::vector<std::string>& names)
{
    // Normalize columns so the rank test is scale free.
    MatrixXd scaled = jac;
    for (Eigen::Index j = 0; j < scaled.cols(); ++j) {
        const double norm = scaled.col(j).norm();
        if (norm > 0.0) {
            scaled.col(j) /= norm;
        }
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(scaled);
    qr.setThreshold(1e-10);
    std::vector<std::string> out;
    const auto rank = qr.rank();
    if (rank == scaled.cols()) {
        for (Eigen::Index j = 0; j < jac.cols(); ++j) {
            if (jac.col(j).norm() == 0.0) {
                out.push_back(names[static_cast<std::size_t>(j)]);
            }
        }
        return out;
    }
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index k = rank; k < scaled.cols(); ++k) {
        out.push_back(names[static_cast<std::size_t>(perm[k])]);
    }
    return out;
}

std::string join(const std::vector<std::string>& v)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) {
        os << (i ? ", " : "") << v[i];
    }
    return os.str();
}

void fill_statistics(FitReport& rep, const MatrixXd& jac, const VectorXd& r, bool scale)
{
    const auto n = jac.cols();
    const double chi2 = r.squaredNorm();
    rep.residual_rms = r.size() > 0 ? std::sqrt(chi2 / static_cast<double>(r.size())) : 0.0;
    const double s2 = (scale && rep.dof > 0) ? chi2 / static_cast<double>(rep.dof) : 1.0;
    const MatrixXd normal = jac.transpose() * jac;
    Eigen::LDLT<MatrixXd> ldlt(normal);
    MatrixXd inv = ldlt.solve(MatrixXd::Identity(n, n));
    rep.covariance = 0.5 * (inv + inv.transpose()) * s2;
    rep.std_errors.resize(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
        rep.std_errors[static_cast<std::size_t>(j)] = std::sqrt(std::max(0.0, rep.covariance(j, j)));
    }
}

} // namespace

std::size_t FitReport::index(std::string_view name) const
{
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) {
            return i;
        }
    }
    throw std::out_of_range("fit report has no parameter '" + std::string(name) + "'");
}

bool FitReport::has(std::string_view name) const
{
    return std::find(names.begin(), names.end(), name) != names.end();
}

double FitReport::value(std::string_view name) const { return values[index(name)]; }
double FitReport::error(std::string_view name) const { return std_errors[index(name)]; }

FitReport nlls_solve(const NllsProblem& problem, const NllsOptions& options)
{
    const std::size_t n = problem.initial.size();
    if (n == 0 || problem.names.size() != n) {
        throw std::invalid_argument("nlls: need one name per initial parameter");
    }
    if (problem.n_residuals <= n) {
        throw std::invalid_argument("nlls: need more data points than parameters (" +
                                    std::to_string(problem.n_residuals) + " <= " + std::to_string(n) + ")");
    }
    if (!problem.residuals) {
        throw std::invalid_argument("nlls: missing residual function");
    }

    Evaluator eval{problem, {}, 0};
    for (double v : problem.initial) {
        eval.typical.push_back(std::abs(v) > 0.0 ? std::abs(v) : 1.0);
    }

    FitReport rep;
    rep.names = problem.names;
    rep.n_points = problem.n_residuals;
    rep.dof = problem.n_residuals - n;

    VectorXd p = Eigen::Map<const VectorXd>(problem.initial.data(), static_cast<Eigen::Index>(n));
    VectorXd r, r_new;
    MatrixXd jac;
    auto fail = [&](std::string why) {
        rep.converged = false;
        rep.stop_reason = "failed";
        rep.diagnostics.push_back(std::move(why));
        rep.values.assign(p.data(), p.data() + p.size());
        rep.std_errors.assign(n, std::numeric_limits<double>::quiet_NaN());
        rep.covariance = MatrixXd::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n),
                                            std::numeric_limits<double>::quiet_NaN());
        return rep;
    };

    if (!eval.residuals(p, r)) {
        return fail("residuals are not finite at the initial guess");
    }
    double cost = r.squaredNorm();
    const double initial_cost = cost;
    double lambda = options.initial_lambda;

    for (int it = 1; it <= options.max_iterations; ++it) {
        rep.iterations = it;
        if (!eval.jacobian(p, jac)) {
            return fail("Jacobian is not finite at iteration " + std::to_string(it));
        }
        if (auto bad = unidentifiable(jac, problem.names); !bad.empty()) {
            return fail("singular Jacobian: cannot identify " + join(bad));
        }
        const VectorXd grad = jac.transpose() * r;
        rep.gradient_norm = grad.cwiseAbs().maxCoeff();
        if (rep.gradient_norm < options.gradient_tolerance || cost == 0.0) {
            rep.converged = true;
            rep.stop_reason = "gradient";
            break;
        }
        const MatrixXd normal = jac.transpose() * jac;
        // Relative cost reduction a full Gauss-Newton step would achieve.
        const VectorXd gn = normal.ldlt().solve(-grad);
        const double predicted = -grad.dot(gn) / cost;
        if (predicted >= 0.0 && predicted < options.cost_tolerance) {
            rep.converged = true;
            rep.stop_reason = "cost";
            break;
        }

        const VectorXd diag = normal.diagonal().cwiseMax(1e-300);
        bool accepted = false;
        while (lambda < max_lambda) {
            MatrixXd damped = normal;
            damped.diagonal() += lambda * diag;
            const VectorXd step = damped.ldlt().solve(-grad);
            const VectorXd trial = p + step;
            if (step.allFinite() && eval.residuals(trial, r_new)) {
                const double trial_cost = r_new.squaredNorm();
                if (trial_cost < cost) {
                    const double rel = (cost - trial_cost) / cost;
                    p = trial;
                    r = r_new;
                    cost = trial_cost;
                    lambda = std::max(lambda / 10.0, 1e-15);
                    accepted = true;
                    if (rel < options.cost_tolerance && predicted < 1e3 * options.cost_tolerance) {
                        rep.converged = true;
                        rep.stop_reason = "cost";
                    }
                    break;
                }
                if ((step.array().abs() <= 1e-15 * p.array().abs()).all()) {
                    // The step no longer changes p: cost is at its rounding floor.
                    break;
                }
            }
            lambda *= 10.0;
        }
        if (rep.converged) {
            break;
        }
        if (!accepted) {
            // No decrease possible: accept as converged when the remaining
            // predicted improvement is negligible, either outright or as a
            // change in chi-square in units of the fitted variance, or when the
            // residuals have already been driven down to rounding level.
            const bool negligible = predicted < 1e-6 || predicted * static_cast<double>(rep.dof) < 1e-2;
            if (negligible || cost <= 1e-16 * initial_cost) {
                rep.converged = true;
                rep.stop_reason = "stalled at rounding floor";
            } else {
                rep.converged = false;
                rep.stop_reason = "stalled";
                rep.diagnostics.push_back("no step decreases the cost; predicted relative reduction " +
                                          std::to_string(predicted));
            }
            break;
        }
    }
    if (!rep.converged && rep.stop_reason.empty()) {
        rep.stop_reason = "max iterations";
        rep.diagnostics.push_back("no convergence after " + std::to_string(options.max_iterations) +
                                  " iterations");
    }

    if (!eval.jacobian(p, jac)) {
        return fail("Jacobian is not finite at the solution");
    }
    if (auto bad = unidentifiable(jac, problem.names); !bad.empty()) {
        return fail("singular Jacobian at the solution: cannot identify " + join(bad));
    }
    rep.gradient_norm = (jac.transpose() * r).cwiseAbs().maxCoeff();
    rep.values.assign(p.data(), p.data() + p.size());
    fill_statistics(rep, jac, r, options.scale_covariance);
    return rep;
}

FitReport nlls_fit(const CurveModel& model, std::span<const double> x, std::span<const double> y,
                   std::span<const double> sigma, std::vector<std::string> names,
                   std::vector<double> initial, const NllsOptions& options)
{
    if (x.size() != y.size() || (!sigma.empty() && sigma.size() != x.size())) {
        throw std::invalid_argument("nlls_fit: x, y and sigma lengths differ");
    }
    for (double s : sigma) {
        if (!(s > 0.0)) {
            throw std::invalid_argument("nlls_fit: sigma must be positive");
        }
    }
    NllsProblem prob;
    prob.n_residuals = x.size();
    prob.names = std::move(names);
    prob.initial = std::move(initial);
    prob.residuals = [&](std::span<const double> p, std::span<double> r) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double s = sigma.empty() ? 1.0 : sigma[i];
            r[i] = (y[i] - model(x[i], p)) / s;
        }
    };
    return nlls_solve(prob, options);
}

FitReport reparametrize(const FitReport& internal, std::vector<std::string> names,
                        const std::function<std::vector<double>(std::span<const double>)>& map)
{
    FitReport out = internal;
    out.names = std::move(names);
    const std::vector<double> values = map(internal.values);
    if (values.size() != out.names.size()) {
        throw std::logic_error("reparametrize: map output does not match names");
    }
    out.values = values;
    const auto m = static_cast<Eigen::Index>(values.size());
    const auto n = static_cast<Eigen::Index>(internal.values.size());
    if (!internal.covariance.allFinite()) {
        out.covariance = MatrixXd::Constant(m, m, std::numeric_limits<double>::quiet_NaN());
        out.std_errors.assign(values.size(), std::numeric_limits<double>::quiet_NaN());
        return out;
    }
    MatrixXd g(m, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double u = internal.values[static_cast<std::size_t>(j)];
        const double h = 1e-7 * std::max(std::abs(u), 1e-3);
        std::vector<double> up = internal.values, dn = internal.values;
        up[static_cast<std::size_t>(j)] = u + h;
        dn[static_cast<std::size_t>(j)] = u - h;
        const auto fu = map(up);
        const auto fd = map(dn);
        for (Eigen::Index i = 0; i < m; ++i) {
            g(i, j) = (fu[static_cast<std::size_t>(i)] - fd[static_cast<std::size_t>(i)]) / (2.0 * h);
        }
    }
    out.covariance = g * internal.covariance * g.transpose();
    out.std_errors.resize(values.size());
    for (Eigen::Index i = 0; i < m; ++i) {
        out.std_errors[static_cast<std::size_t>(i)] = std::sqrt(std::max(0.0, out.covariance(i, i)));
    }
    return out;
}

Interval confidence_interval(const FitReport& report, std::string_view name, double level)
{
    if (!(level > 0.0) || !(level < 1.0)) {
        throw std::invalid_argument("confidence_interval: level must lie in (0, 1)");
    }
    const double v = report.value(name);
    const double e = report.error(name);
    double q;
    if (report.dof == 0) {
        q = boost::math::quantile(boost::math::normal_distribution<>{}, 0.5 + 0.5 * level);
    } else {
        boost::math::students_t dist(static_cast<double>(report.dof));
        q = boost::math::quantile(dist, 0.5 + 0.5 * level);
    }
    return {v - q * e, v + q * e};
}

} // namespace cemech
