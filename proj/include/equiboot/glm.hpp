#pragma once

#include <Eigen/Core>
#include <array>
#include <optional>
#include <string>

#include "equiboot/dataset.hpp"
#include "equiboot/logit.hpp"

namespace equiboot {

/// Logistic regression over the design [1 | one-hot(group) | z], with an
/// optional per-group intercept offset (used by the sampling-rate
/// adjustment) and a decision threshold.
struct LogisticModel {
    double beta0 = 0.0;
    Eigen::VectorXd beta_a;        // one coefficient per group
    Eigen::VectorXd beta_z;        // one coefficient per z feature
    Eigen::VectorXd group_offsets; // added to the intercept per group; default 0
    double threshold = 0.5;        // classify 1 iff probability >= threshold

    std::vector<std::string> group_names;
    std::vector<std::string> feature_names;

    // fit diagnostics
    bool converged = true;
    int iterations = 0;
    double final_grad_norm = 0.0;

    int num_groups() const { return static_cast<int>(beta_a.size()); }
    Eigen::Index n_features() const { return beta_z.size(); }

    double linear_score(int group, const Eigen::Ref<const Eigen::VectorXd>& z_row) const {
        return beta0 + group_offsets[group] + beta_a[group] + beta_z.dot(z_row);
    }
};

struct FitOptions {
    double tol_grad = 0.0; // sup-norm gradient tolerance; <= 0 selects 1e-8 * n
    int max_iter = 100;
    double ridge = 0.0;    // lambda * ||(beta_a, beta_z)||^2 added for conditioning
    bool verbose = false;
};

// Coefficient vector layout: [beta0, beta_a..., beta_z...].
Eigen::Index theta_size(const Dataset& data);

// Negative log likelihood sum_i w_i * log(1 + exp(-yt_i * theta . xi_i))
// with yt = 2y - 1, evaluated in the overflow-safe form. Weights default
// to 1 and must be nonnegative.
double nll(const Eigen::VectorXd& theta, const Dataset& data,
           const Eigen::VectorXd* weights = nullptr);

// g = Xi^T (mu - y), with weights multiplying the residual rows.
Eigen::VectorXd gradient(const Eigen::VectorXd& theta, const Dataset& data,
                         const Eigen::VectorXd* weights = nullptr);

// H = Xi^T diag[w * mu * (1 - mu)] Xi; symmetric positive semi-definite.
Eigen::MatrixXd hessian(const Eigen::VectorXd& theta, const Dataset& data,
                        const Eigen::VectorXd* weights = nullptr);

// Damped Newton on the (optionally ridge-stabilized) negative log
// likelihood, starting from theta = 0. The step is halved until the
// objective decreases (at most 30 halvings). The intercept column equals
// the sum of the one-hot group columns, so the unpenalized Hessian is
// singular; a singular solve is retried with ridge max(opts.ridge, 1e-8).
// A fit that exhausts max_iter, or whose line search can no longer certify
// a decrease in double precision, is returned with converged = false.
LogisticModel fit_logistic(const Dataset& data, const FitOptions& opts = {},
                           const Eigen::VectorXd* weights = nullptr);

double predict_proba(const LogisticModel& model, int group,
                     const Eigen::Ref<const Eigen::VectorXd>& z_row);

// All rows at once.
Eigen::VectorXd predict_proba(const LogisticModel& model, const Dataset& data);

int classify(const LogisticModel& model, int group,
             const Eigen::Ref<const Eigen::VectorXd>& z_row);

/// Naive Bayes with the group term kept as its own factor:
/// posterior(y | a, z) ~ prior(y) * P(A=a|Y=y) * prod_k P(Z_k=z_k|Y=y).
/// Z columns must be binary; tables are Laplace-smoothed.
struct NaiveBayesModel {
    std::array<double, 2> prior{0.5, 0.5};
    Eigen::MatrixXd group_cond;   // num_groups x 2, column y: P(A=a | Y=y)
    Eigen::MatrixXd feature_cond; // p x 2, column y: P(Z_k=1 | Y=y)
    double smoothing = 1.0;

    std::vector<std::string> group_names;
    std::vector<std::string> feature_names;

    int num_groups() const { return static_cast<int>(group_cond.rows()); }
};

NaiveBayesModel fit_naive_bayes(const Dataset& data, double smoothing = 1.0);

// Normalized class probabilities {P(Y=0|a,z), P(Y=1|a,z)}, computed in log
// space.
std::array<double, 2> nb_class_scores(const NaiveBayesModel& model, int group,
                                      const Eigen::Ref<const Eigen::VectorXd>& z_row);

// P(Y=1 | group, z).
double nb_posterior(const NaiveBayesModel& model, int group,
                    const Eigen::Ref<const Eigen::VectorXd>& z_row);

// J2(theta): the expected value of the bootstrap objective, i.e. nll with
// per-row weights M / n_{a_i}^{y_i}. Every (group, label) cell must be
// nonempty.
double equity_weighted_nll(const Eigen::VectorXd& theta, const Dataset& data,
                           Eigen::Index m_per_cell);

// Flat text serialization: one `name<TAB>value` line per coefficient
// (intercept, group:<name>, z:<feature>, threshold, offset:<group>), using
// shortest round-trip decimal representation. parse_logistic inverts it
// bit-exactly.
std::string serialize_logistic(const LogisticModel& model);
LogisticModel parse_logistic(const std::string& text);

} // namespace equiboot
