#include "baqca/glm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

#include "baqca/error.hpp"
#include "csv.hpp"

namespace baqca {

namespace {

constexpr double kCollinearTolerance = 1e-9;  // relative residual variance
constexpr int kMaxHalvings = 30;

// log(1 + exp(x)) without overflow
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double deviance_of(const Eigen::VectorXd& y, const Eigen::VectorXd& eta) {
    double ll = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) ll += y[i] * eta[i] - softplus(eta[i]);
    return -2.0 * ll;
}

// Keep columns in order, dropping any whose residual against the kept ones
// is negligible (constant next to an intercept, exact linear combinations).
std::vector<bool> find_dropped(const Eigen::MatrixXd& X) {
    const Eigen::Index p = X.cols();
    const Eigen::MatrixXd gram = X.transpose() * X;
    std::vector<bool> dropped(static_cast<std::size_t>(p), false);
    std::vector<Eigen::Index> kept;
    for (Eigen::Index j = 0; j < p; ++j) {
        const double own = gram(j, j);
        double residual = own;
        if (!kept.empty() && own > 0.0) {
            const auto k = static_cast<Eigen::Index>(kept.size());
            Eigen::MatrixXd gkk(k, k);
            Eigen::VectorXd gkj(k);
            for (Eigen::Index a = 0; a < k; ++a) {
                gkj[a] = gram(kept[static_cast<std::size_t>(a)], j);
                for (Eigen::Index b = 0; b < k; ++b)
                    gkk(a, b) = gram(kept[static_cast<std::size_t>(a)], kept[static_cast<std::size_t>(b)]);
            }
            residual = own - gkj.dot(gkk.ldlt().solve(gkj));
        }
        if (!(own > 0.0) || residual <= kCollinearTolerance * own)
            dropped[static_cast<std::size_t>(j)] = true;
        else
            kept.push_back(j);
    }
    return dropped;
}

}  // namespace

void DesignSpec::validate() const {
    std::set<std::string> seen;
    for (const auto& t : terms)
        if (!seen.insert(t).second) throw InputError(fmt::format("duplicate design term '{}'", t));
    for (const auto& [a, b] : interactions) {
        if (!seen.contains(a) || !seen.contains(b))
            throw InputError(fmt::format("interaction {}:{} uses a term that is not a main effect", a, b));
        if (a == b) throw InputError(fmt::format("interaction {}:{} repeats a term", a, b));
    }
    if (terms.empty() && !intercept) throw InputError("design has no columns");
}

std::vector<std::string> DesignSpec::column_names() const {
    std::vector<std::string> out;
    if (intercept) out.push_back("(Intercept)");
    for (const auto& t : terms) out.push_back(t);
    for (const auto& [a, b] : interactions) out.push_back(a + ":" + b);
    return out;
}

std::vector<std::string> DesignSpec::column_labels() const {
    auto label = [&](const std::string& name) {
        auto it = labels.find(name);
        return it == labels.end() ? name : it->second;
    };
    std::vector<std::string> out;
    if (intercept) out.push_back("Intercept");
    for (const auto& t : terms) out.push_back(label(t));
    for (const auto& [a, b] : interactions) out.push_back(label(a) + " * " + label(b));
    return out;
}

const std::vector<double>& PredictorFrame::column(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw InputError(fmt::format("missing predictor '{}'", name));
    return columns[static_cast<std::size_t>(it - names.begin())];
}

void PredictorFrame::add(std::string name, std::vector<double> values) {
    if (!columns.empty() && values.size() != rows())
        throw InputError(fmt::format("predictor '{}' has {} rows, expected {}", name, values.size(), rows()));
    names.push_back(std::move(name));
    columns.push_back(std::move(values));
}

double PredictorFrame::mean(const std::string& name) const {
    const auto& col = column(name);
    if (col.empty()) throw InputError("mean of an empty predictor");
    double sum = 0.0;
    for (double x : col) sum += x;
    return sum / static_cast<double>(col.size());
}

Design build_design(const PredictorFrame& frame, const DesignSpec& spec) {
    spec.validate();
    const auto n = static_cast<Eigen::Index>(frame.rows());
    Design d;
    d.columns = spec.column_names();
    d.matrix.resize(n, static_cast<Eigen::Index>(d.columns.size()));
    Eigen::Index c = 0;
    if (spec.intercept) d.matrix.col(c++).setOnes();
    for (const auto& t : spec.terms) {
        const auto& col = frame.column(t);
        d.matrix.col(c++) = Eigen::Map<const Eigen::VectorXd>(col.data(), n);
    }
    for (const auto& [a, b] : spec.interactions) {
        const auto& ca = frame.column(a);
        const auto& cb = frame.column(b);
        for (Eigen::Index i = 0; i < n; ++i)
            d.matrix(i, c) = ca[static_cast<std::size_t>(i)] * cb[static_cast<std::size_t>(i)];
        ++c;
    }
    if (spec.intercept && n > 0) {
        for (Eigen::Index j = 1; j < d.matrix.cols(); ++j)
            if ((d.matrix.col(j).array() == d.matrix(0, j)).all())
                d.warnings.push_back(fmt::format("column '{}' is constant", d.columns[static_cast<std::size_t>(j)]));
    }
    return d;
}

Design build_design(std::span<const Record> records, const DesignSpec& spec) {
    PredictorFrame frame;
    for (const auto& t : spec.terms) {
        std::vector<double> values;
        values.reserve(records.size());
        for (std::size_t i = 0; i < records.size(); ++i) {
            auto it = records[i].find(t);
            if (it == records[i].end()) throw InputError(fmt::format("record {} lacks field '{}'", i + 1, t));
            values.push_back(it->second);
        }
        frame.add(t, std::move(values));
    }
    if (spec.terms.empty()) frame.add("__rows", std::vector<double>(records.size(), 0.0));
    return build_design(frame, spec);
}

Eigen::RowVectorXd design_row(const Record& record, const DesignSpec& spec) {
    auto get = [&](const std::string& name) {
        auto it = record.find(name);
        if (it == record.end()) throw InputError(fmt::format("record lacks field '{}'", name));
        return it->second;
    };
    Eigen::RowVectorXd row(static_cast<Eigen::Index>(spec.column_names().size()));
    Eigen::Index c = 0;
    if (spec.intercept) row[c++] = 1.0;
    for (const auto& t : spec.terms) row[c++] = get(t);
    for (const auto& [a, b] : spec.interactions) row[c++] = get(a) * get(b);
    return row;
}

double logistic(double eta) {
    if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

double normal_quantile(double p) { return boost::math::quantile(boost::math::normal_distribution<double>(), p); }

double log_likelihood(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const Eigen::VectorXd& beta) {
    return -0.5 * deviance_of(y, X * beta);
}

std::size_t GlmFit::column_index(const std::string& name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw InputError(fmt::format("fit has no column '{}'", name));
    return static_cast<std::size_t>(it - columns.begin());
}

GlmFit fit_logistic(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const FitOptions& options,
                    std::vector<std::string> column_names) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (y.size() != n) throw InputError(fmt::format("response has {} rows, design has {}", y.size(), n));
    if (n == 0) throw InputError("cannot fit a model to zero observations");
    if (options.max_iter < 1) throw InputError("max_iter must be >= 1");
    for (Eigen::Index i = 0; i < n; ++i)
        if (y[i] != 0.0 && y[i] != 1.0) throw InputError("logistic response must be 0/1");
    if (column_names.empty())
        for (Eigen::Index j = 0; j < p; ++j) column_names.push_back(fmt::format("x{}", j));
    if (static_cast<Eigen::Index>(column_names.size()) != p) throw LogicError("column name count mismatch");

    GlmFit fit;
    fit.columns = std::move(column_names);
    fit.num_obs = static_cast<std::size_t>(n);
    fit.dropped = find_dropped(X);
    std::vector<Eigen::Index> kept;
    for (Eigen::Index j = 0; j < p; ++j) {
        if (fit.dropped[static_cast<std::size_t>(j)])
            fit.warnings.push_back(fmt::format("dropped column '{}' (constant or collinear)", fit.columns[static_cast<std::size_t>(j)]));
        else
            kept.push_back(j);
    }
    const auto k = static_cast<Eigen::Index>(kept.size());
    Eigen::MatrixXd Xr(n, k);
    for (Eigen::Index c = 0; c < k; ++c) Xr.col(c) = X.col(kept[static_cast<std::size_t>(c)]);

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(n);
    double dev = deviance_of(y, eta);
    Eigen::VectorXd mu(n), w(n);
    auto refresh = [&](const Eigen::VectorXd& e) {
        for (Eigen::Index i = 0; i < n; ++i) {
            mu[i] = logistic(e[i]);
            w[i] = std::max(mu[i] * (1.0 - mu[i]), 1e-300);
        }
    };

    for (int iter = 1; iter <= options.max_iter && k > 0; ++iter) {
        fit.iterations = iter;
        refresh(eta);
        const Eigen::MatrixXd info = Xr.transpose() * w.asDiagonal() * Xr;
        const Eigen::VectorXd score = Xr.transpose() * (y - mu);
        Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
        Eigen::VectorXd step = ldlt.solve(score);
        if (!step.allFinite()) break;

        Eigen::VectorXd trial = beta + step;
        Eigen::VectorXd trial_eta = Xr * trial;
        double trial_dev = deviance_of(y, trial_eta);
        for (int h = 0; h < kMaxHalvings && !(std::isfinite(trial_dev) && trial_dev <= dev * (1 + 1e-12)); ++h) {
            step *= 0.5;
            trial = beta + step;
            trial_eta = Xr * trial;
            trial_dev = deviance_of(y, trial_eta);
        }
        const double change = std::abs(trial_dev - dev) / (std::abs(trial_dev) + 0.1);
        beta = trial;
        eta = trial_eta;
        dev = trial_dev;
        if (change < options.tol) {
            fit.converged = true;
            break;
        }
    }
    if (k == 0) fit.converged = true;

    refresh(eta);
    Eigen::MatrixXd cov_kept = Eigen::MatrixXd::Zero(k, k);
    if (k > 0) {
        const Eigen::MatrixXd info = Xr.transpose() * w.asDiagonal() * Xr;
        cov_kept = info.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
    }

    fit.coefficients = Eigen::VectorXd::Zero(p);
    fit.standard_errors = Eigen::VectorXd::Constant(p, std::numeric_limits<double>::quiet_NaN());
    fit.covariance = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index a = 0; a < k; ++a) {
        const Eigen::Index ja = kept[static_cast<std::size_t>(a)];
        fit.coefficients[ja] = beta[a];
        fit.standard_errors[ja] = std::sqrt(std::max(cov_kept(a, a), 0.0));
        for (Eigen::Index b = 0; b < k; ++b) fit.covariance(ja, kept[static_cast<std::size_t>(b)]) = cov_kept(a, b);
    }
    fit.deviance = dev;
    fit.num_params = static_cast<std::size_t>(k);
    fit.aic = dev + 2.0 * static_cast<double>(k);

    const double ybar = y.mean();
    const bool has_intercept = !fit.columns.empty() && fit.columns.front() == "(Intercept)";
    if (has_intercept && ybar > 0.0 && ybar < 1.0)
        fit.null_deviance = deviance_of(y, Eigen::VectorXd::Constant(n, std::log(ybar / (1.0 - ybar))));
    else if (has_intercept)
        fit.null_deviance = 0.0;
    else
        fit.null_deviance = deviance_of(y, Eigen::VectorXd::Zero(n));

    constexpr double eps = 10 * std::numeric_limits<double>::epsilon();
    fit.separation = (beta.array().abs() > kSeparationLimit).any() ||
                     (mu.array() < eps).any() || (mu.array() > 1.0 - eps).any();
    if (fit.separation) fit.warnings.push_back("complete or quasi-complete separation: coefficients diverge");
    if (!fit.converged) fit.warnings.push_back(fmt::format("IRLS did not converge in {} iterations", options.max_iter));
    return fit;
}

GlmFit fit_logistic(std::span<const double> y, const PredictorFrame& frame, const DesignSpec& spec,
                    const FitOptions& options) {
    Design design = build_design(frame, spec);
    Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
    GlmFit fit = fit_logistic(yv, design.matrix, options, design.columns);
    fit.spec = spec;
    fit.warnings.insert(fit.warnings.begin(), design.warnings.begin(), design.warnings.end());
    return fit;
}

double linear_predictor(const GlmFit& fit, const Eigen::RowVectorXd& row) {
    if (row.size() != fit.coefficients.size()) throw InputError("record does not match the fitted design");
    return row.dot(fit.coefficients);
}

double predict_prob(const GlmFit& fit, const Eigen::RowVectorXd& row) { return logistic(linear_predictor(fit, row)); }

double predict_prob(const GlmFit& fit, const Record& record) { return predict_prob(fit, design_row(record, fit.spec)); }

std::pair<double, double> linear_ci(const GlmFit& fit, const Eigen::RowVectorXd& row, double level) {
    if (!(level > 0.0 && level < 1.0)) throw InputError("confidence level must lie in (0, 1)");
    const double eta = linear_predictor(fit, row);
    const double se = std::sqrt(std::max(0.0, double(row * fit.covariance * row.transpose())));
    const double z = normal_quantile(0.5 + level / 2.0);
    return {logistic(eta - z * se), logistic(eta + z * se)};
}

std::pair<double, double> linear_ci(const GlmFit& fit, const Record& record, double level) {
    return linear_ci(fit, design_row(record, fit.spec), level);
}

std::string summary_csv(const GlmFit& fit) {
    const auto labels = fit.spec.terms.empty() && !fit.spec.intercept ? fit.columns : fit.spec.column_labels();
    const auto& names = labels.size() == fit.columns.size() ? labels : fit.columns;
    std::ostringstream out;
    out << "term,estimate,std_error,z,p\n";
    for (std::size_t j = 0; j < fit.columns.size(); ++j) {
        const auto idx = static_cast<Eigen::Index>(j);
        out << csv::escape(names[j]) << ',';
        if (fit.dropped[j]) {
            out << "NA,NA,NA,NA\n";
            continue;
        }
        const double est = fit.coefficients[idx];
        const double se = fit.standard_errors[idx];
        const double z = est / se;
        const double pval = std::erfc(std::abs(z) / std::sqrt(2.0));
        out << fmt::format("{:.6g},{:.6g},{:.6g},{:.6g}\n", est, se, z, pval);
    }
    return out.str();
}

}  // namespace baqca
