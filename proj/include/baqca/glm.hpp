#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace baqca {

// Which columns a logistic model uses.  Column order: intercept, main
// effects, then one product column per interaction pair, all in spec order.
struct DesignSpec {
    std::vector<std::string> terms;
    std::vector<std::pair<std::string, std::string>> interactions;
    bool intercept = true;
    // Optional display labels for summaries; interaction labels join with " * ".
    std::map<std::string, std::string> labels;

    void validate() const;
    std::vector<std::string> column_names() const;   // "(Intercept)", "x", "x:z"
    std::vector<std::string> column_labels() const;  // "Intercept", labels or names
};

using Record = std::map<std::string, double>;

// Columnar predictor data.
struct PredictorFrame {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;

    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
    const std::vector<double>& column(const std::string& name) const;
    void add(std::string name, std::vector<double> values);
    double mean(const std::string& name) const;
};

struct Design {
    Eigen::MatrixXd matrix;
    std::vector<std::string> columns;
    std::vector<std::string> warnings;  // e.g. constant columns next to an intercept
};

Design build_design(const PredictorFrame& frame, const DesignSpec& spec);
Design build_design(std::span<const Record> records, const DesignSpec& spec);
Eigen::RowVectorXd design_row(const Record& record, const DesignSpec& spec);

struct FitOptions {
    double tol = 1e-8;  // relative deviance change, |dD| / (|D| + 0.1)
    int max_iter = 50;
};

// Coefficients beyond this magnitude are treated as diverging (separation).
inline constexpr double kSeparationLimit = 30.0;

struct GlmFit {
    DesignSpec spec;
    std::vector<std::string> columns;
    Eigen::VectorXd coefficients;     // dropped columns hold 0
    Eigen::VectorXd standard_errors;  // dropped columns hold NaN
    Eigen::MatrixXd covariance;       // rows/cols of dropped columns are 0
    std::vector<bool> dropped;
    double deviance = 0.0;
    double null_deviance = 0.0;
    double aic = 0.0;
    std::size_t num_obs = 0;
    std::size_t num_params = 0;  // estimated (non-dropped) columns
    bool converged = false;
    bool separation = false;
    int iterations = 0;
    std::vector<std::string> warnings;

    // Index of a design column by name; throws InputError when unknown.
    std::size_t column_index(const std::string& name) const;
    double coefficient(const std::string& name) const { return coefficients[static_cast<Eigen::Index>(column_index(name))]; }
};

// IRLS (Newton–Raphson for the canonical logit link) with step-halving.
// Collinear and constant columns are dropped in column order with a warning.
GlmFit fit_logistic(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const FitOptions& options = {},
                    std::vector<std::string> column_names = {});

GlmFit fit_logistic(std::span<const double> y, const PredictorFrame& frame, const DesignSpec& spec,
                    const FitOptions& options = {});

double log_likelihood(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const Eigen::VectorXd& beta);

double logistic(double eta);
double normal_quantile(double p);

double linear_predictor(const GlmFit& fit, const Eigen::RowVectorXd& row);
double predict_prob(const GlmFit& fit, const Record& record);
double predict_prob(const GlmFit& fit, const Eigen::RowVectorXd& row);

// logistic(x'b -/+ z * sqrt(x' S x)) with z the two-sided normal quantile.
std::pair<double, double> linear_ci(const GlmFit& fit, const Record& record, double level = 0.95);
std::pair<double, double> linear_ci(const GlmFit& fit, const Eigen::RowVectorXd& row, double level = 0.95);

// One row per column: term, estimate, SE, z, p.
std::string summary_csv(const GlmFit& fit);

}  // namespace baqca
