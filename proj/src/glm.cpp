#include "equiboot/glm.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace equiboot {

Eigen::Index theta_size(const Dataset& data) {
    return 1 + static_cast<Eigen::Index>(data.num_groups()) + data.n_features();
}

namespace {

void check_theta(const Eigen::VectorXd& theta, const Dataset& data) {
    if (theta.size() != theta_size(data))
        throw std::invalid_argument("glm: theta has " + std::to_string(theta.size()) +
                                    " entries, expected " + std::to_string(theta_size(data)));
}

void check_weights(const Eigen::VectorXd* weights, const Dataset& data) {
    if (!weights) return;
    if (weights->size() != data.n_rows())
        throw std::invalid_argument("glm: weight vector length mismatch");
    if ((weights->array() < 0.0).any())
        throw std::invalid_argument("glm: negative weight");
}

// eta_i = beta0 + beta_a[group_i] + z_i . beta_z for the flat layout.
Eigen::VectorXd linear_predictor(const Eigen::VectorXd& theta, const Dataset& data) {
    Eigen::VectorXd eta = data.z * theta.tail(data.n_features());
    const double beta0 = theta[0];
    for (Eigen::Index i = 0; i < eta.size(); ++i)
        eta[i] += beta0 + theta[1 + data.group[static_cast<std::size_t>(i)]];
    return eta;
}

} // namespace

double nll(const Eigen::VectorXd& theta, const Dataset& data, const Eigen::VectorXd* weights) {
    check_theta(theta, data);
    check_weights(weights, data);
    const Eigen::VectorXd eta = linear_predictor(theta, data);
    double obj = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const double yt = data.label[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;
        const double w = weights ? (*weights)[i] : 1.0;
        obj += w * log1pexp(-yt * eta[i]);
    }
    return obj;
}

Eigen::VectorXd gradient(const Eigen::VectorXd& theta, const Dataset& data,
                         const Eigen::VectorXd* weights) {
    check_theta(theta, data);
    check_weights(weights, data);
    const Eigen::VectorXd eta = linear_predictor(theta, data);

    Eigen::VectorXd r(eta.size()); // w * (mu - y)
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const double w = weights ? (*weights)[i] : 1.0;
        r[i] = w * (sigmoid(eta[i]) - data.label[static_cast<std::size_t>(i)]);
    }

    Eigen::VectorXd g = Eigen::VectorXd::Zero(theta.size());
    g[0] = r.sum();
    for (Eigen::Index i = 0; i < eta.size(); ++i)
        g[1 + data.group[static_cast<std::size_t>(i)]] += r[i];
    g.tail(data.n_features()) = data.z.transpose() * r;
    return g;
}

Eigen::MatrixXd hessian(const Eigen::VectorXd& theta, const Dataset& data,
                        const Eigen::VectorXd* weights) {
    check_theta(theta, data);
    check_weights(weights, data);
    const Eigen::VectorXd eta = linear_predictor(theta, data);
    const int a = data.num_groups();
    const Eigen::Index p = data.n_features();
    const Eigen::Index dim = theta.size();

    Eigen::VectorXd d(eta.size()); // w * mu * (1 - mu)
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const double mu = sigmoid(eta[i]);
        const double w = weights ? (*weights)[i] : 1.0;
        d[i] = w * mu * (1.0 - mu);
    }

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    // blocks against the intercept and one-hot columns
    Eigen::VectorXd group_d = Eigen::VectorXd::Zero(a);
    Eigen::MatrixXd group_z = Eigen::MatrixXd::Zero(a, p); // sum_i d_i z_i per group
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const int gi = data.group[static_cast<std::size_t>(i)];
        group_d[gi] += d[i];
        group_z.row(gi) += d[i] * data.z.row(i);
    }
    h(0, 0) = d.sum();
    for (int j = 0; j < a; ++j) {
        h(0, 1 + j) = h(1 + j, 0) = group_d[j];
        h(1 + j, 1 + j) = group_d[j]; // one-hot columns square to themselves
        h.block(1 + j, 1 + a, 1, p) = group_z.row(j);
        h.block(1 + a, 1 + j, p, 1) = group_z.row(j).transpose();
    }
    h.block(0, 1 + a, 1, p) = group_z.colwise().sum();
    h.block(1 + a, 0, p, 1) = group_z.colwise().sum().transpose();

    // z block via a rank update on the sqrt(d)-scaled predictors
    Eigen::MatrixXd zs = d.array().sqrt().matrix().asDiagonal() * data.z;
    Eigen::MatrixXd hzz = Eigen::MatrixXd::Zero(p, p);
    hzz.selfadjointView<Eigen::Lower>().rankUpdate(zs.transpose());
    h.block(1 + a, 1 + a, p, p) = hzz.selfadjointView<Eigen::Lower>();
    return h;
}

namespace {

struct NewtonResult {
    Eigen::VectorXd theta;
    bool ok = false;        // numerics stayed sound (independent of convergence)
    bool converged = false;
    int iterations = 0;
    double grad_norm = 0.0;
};

double penalized_obj(const Eigen::VectorXd& theta, const Dataset& data,
                     const Eigen::VectorXd* weights, double ridge) {
    double obj = nll(theta, data, weights);
    if (ridge > 0.0) obj += ridge * theta.tail(theta.size() - 1).squaredNorm();
    return obj;
}

NewtonResult newton(const Dataset& data, const FitOptions& opts, const Eigen::VectorXd* weights,
                    double ridge, double tol) {
    NewtonResult res;
    res.theta = Eigen::VectorXd::Zero(theta_size(data));
    double obj = penalized_obj(res.theta, data, weights, ridge);

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        Eigen::VectorXd g = gradient(res.theta, data, weights);
        if (ridge > 0.0) g.tail(g.size() - 1) += 2.0 * ridge * res.theta.tail(g.size() - 1);
        res.grad_norm = g.lpNorm<Eigen::Infinity>();
        res.iterations = iter;
        if (res.grad_norm <= tol) {
            res.ok = res.converged = true;
            return res;
        }

        Eigen::MatrixXd h = hessian(res.theta, data, weights);
        if (ridge > 0.0)
            h.diagonal().tail(h.rows() - 1).array() += 2.0 * ridge;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
        Eigen::VectorXd delta = ldlt.solve(g);
        const bool bad_solve = ldlt.info() != Eigen::Success || !delta.allFinite() ||
                               delta.norm() > 1e8 ||
                               (h * delta - g).norm() > 1e-6 * (1.0 + g.norm());
        if (bad_solve) return res; // ok = false: caller escalates the ridge

        double step = 1.0;
        double new_obj = 0.0;
        bool decreased = false;
        for (int halving = 0; halving <= 30; ++halving) {
            new_obj = penalized_obj(res.theta - step * delta, data, weights, ridge);
            if (new_obj < obj) {
                decreased = true;
                break;
            }
            step *= 0.5;
        }
        if (!decreased) {
            // No measurable descent left: the objective comparison has hit
            // the double-precision floor of the n-term sum. Terminal state,
            // reported like an exhausted max_iter; more ridge cannot help.
            res.ok = true;
            return res;
        }
        res.theta -= step * delta;
        obj = new_obj;
    }
    Eigen::VectorXd g = gradient(res.theta, data, weights);
    if (ridge > 0.0) g.tail(g.size() - 1) += 2.0 * ridge * res.theta.tail(g.size() - 1);
    res.grad_norm = g.lpNorm<Eigen::Infinity>();
    res.iterations = opts.max_iter;
    res.ok = true; // max_iter exhausted is reported, not retried
    return res;
}

} // namespace

LogisticModel fit_logistic(const Dataset& data, const FitOptions& opts,
                           const Eigen::VectorXd* weights) {
    data.validate();
    check_weights(weights, data);
    if (data.n_rows() == 0) throw std::invalid_argument("glm: empty dataset");

    const double total_weight = weights ? weights->sum() : static_cast<double>(data.n_rows());
    const double tol = opts.tol_grad > 0.0 ? opts.tol_grad : 1e-8 * total_weight;

    // The intercept column equals the sum of the one-hot columns, so the
    // first (usually unpenalized) attempt can hit a singular solve.
    const double ladder[3] = {opts.ridge, std::max(opts.ridge, 1e-8),
                              std::max(opts.ridge, 1e-8) * 1e4};
    NewtonResult res;
    for (double ridge : ladder) {
        res = newton(data, opts, weights, ridge, tol);
        if (res.ok) break;
    }
    if (!res.ok) throw std::runtime_error("glm: Newton solve failed at every ridge level");

    LogisticModel model;
    const int a = data.num_groups();
    model.beta0 = res.theta[0];
    model.beta_a = res.theta.segment(1, a);
    model.beta_z = res.theta.tail(data.n_features());
    model.group_offsets = Eigen::VectorXd::Zero(a);
    model.group_names = data.group_names;
    model.feature_names = data.feature_names;
    model.converged = res.converged;
    model.iterations = res.iterations;
    model.final_grad_norm = res.grad_norm;
    return model;
}

double predict_proba(const LogisticModel& model, int group,
                     const Eigen::Ref<const Eigen::VectorXd>& z_row) {
    return sigmoid(model.linear_score(group, z_row));
}

Eigen::VectorXd predict_proba(const LogisticModel& model, const Dataset& data) {
    Eigen::VectorXd eta = data.z * model.beta_z;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const int g = data.group[static_cast<std::size_t>(i)];
        eta[i] = sigmoid(eta[i] + model.beta0 + model.group_offsets[g] + model.beta_a[g]);
    }
    return eta;
}

int classify(const LogisticModel& model, int group,
             const Eigen::Ref<const Eigen::VectorXd>& z_row) {
    return predict_proba(model, group, z_row) >= model.threshold ? 1 : 0;
}

NaiveBayesModel fit_naive_bayes(const Dataset& data, double smoothing) {
    data.validate();
    if (data.n_rows() == 0) throw std::invalid_argument("nb: empty dataset");
    if (smoothing < 0.0) throw std::invalid_argument("nb: negative smoothing");
    if (((data.z.array() != 0.0) && (data.z.array() != 1.0)).any())
        throw std::invalid_argument("nb: predictors must be binary");

    const int a = data.num_groups();
    const Eigen::Index p = data.n_features();
    NaiveBayesModel model;
    model.smoothing = smoothing;
    model.group_names = data.group_names;
    model.feature_names = data.feature_names;

    std::array<double, 2> n_y{0.0, 0.0};
    Eigen::MatrixXd group_count = Eigen::MatrixXd::Zero(a, 2);
    Eigen::MatrixXd ones_count = Eigen::MatrixXd::Zero(p, 2);
    for (Eigen::Index i = 0; i < data.n_rows(); ++i) {
        const int y = data.label[static_cast<std::size_t>(i)];
        n_y[static_cast<std::size_t>(y)] += 1.0;
        group_count(data.group[static_cast<std::size_t>(i)], y) += 1.0;
        ones_count.col(y) += data.z.row(i).transpose();
    }

    model.prior = {n_y[0] / static_cast<double>(data.n_rows()),
                   n_y[1] / static_cast<double>(data.n_rows())};
    model.group_cond.resize(a, 2);
    model.feature_cond.resize(p, 2);
    for (int y = 0; y < 2; ++y) {
        model.group_cond.col(y) =
            (group_count.col(y).array() + smoothing) / (n_y[static_cast<std::size_t>(y)] + a * smoothing);
        model.feature_cond.col(y) =
            (ones_count.col(y).array() + smoothing) / (n_y[static_cast<std::size_t>(y)] + 2.0 * smoothing);
    }
    return model;
}

std::array<double, 2> nb_class_scores(const NaiveBayesModel& model, int group,
                                      const Eigen::Ref<const Eigen::VectorXd>& z_row) {
    if (group < 0 || group >= model.num_groups())
        throw std::invalid_argument("nb: group index out of range");
    if (z_row.size() != model.feature_cond.rows())
        throw std::invalid_argument("nb: feature vector length mismatch");

    std::array<double, 2> log_s{};
    for (int y = 0; y < 2; ++y) {
        double s = std::log(model.prior[static_cast<std::size_t>(y)]) +
                   std::log(model.group_cond(group, y));
        for (Eigen::Index k = 0; k < z_row.size(); ++k) {
            const double zk = z_row[k];
            if (zk == 1.0)
                s += std::log(model.feature_cond(k, y));
            else if (zk == 0.0)
                s += std::log(1.0 - model.feature_cond(k, y));
            else
                throw std::invalid_argument("nb: predictors must be binary");
        }
        log_s[static_cast<std::size_t>(y)] = s;
    }
    const double m = std::max(log_s[0], log_s[1]);
    const double e0 = std::exp(log_s[0] - m);
    const double e1 = std::exp(log_s[1] - m);
    return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

double nb_posterior(const NaiveBayesModel& model, int group,
                    const Eigen::Ref<const Eigen::VectorXd>& z_row) {
    return nb_class_scores(model, group, z_row)[1];
}

double equity_weighted_nll(const Eigen::VectorXd& theta, const Dataset& data,
                           Eigen::Index m_per_cell) {
    if (m_per_cell <= 0) throw std::invalid_argument("glm: m_per_cell must be positive");
    const auto part = partition_by_group_label(data);
    Eigen::VectorXd weights(data.n_rows());
    for (int a = 0; a < part.num_groups(); ++a) {
        for (int y = 0; y < 2; ++y) {
            const auto& cell = part.cell(a, y);
            if (cell.empty())
                throw std::invalid_argument("glm: empty (group " + std::to_string(a) +
                                            ", label " + std::to_string(y) + ") cell");
            const double w = static_cast<double>(m_per_cell) / static_cast<double>(cell.size());
            for (Eigen::Index i : cell) weights[i] = w;
        }
    }
    return nll(theta, data, &weights);
}

namespace {

void append_shortest(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

double parse_exact(const std::string& s, const std::string& line) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::runtime_error("model: bad value in line '" + line + "'");
    return v;
}

} // namespace

std::string serialize_logistic(const LogisticModel& model) {
    std::string out;
    out += "intercept\t";
    append_shortest(out, model.beta0);
    out += '\n';
    for (int j = 0; j < model.num_groups(); ++j) {
        out += "group:" + model.group_names[static_cast<std::size_t>(j)] + '\t';
        append_shortest(out, model.beta_a[j]);
        out += '\n';
    }
    for (Eigen::Index k = 0; k < model.n_features(); ++k) {
        out += "z:" + model.feature_names[static_cast<std::size_t>(k)] + '\t';
        append_shortest(out, model.beta_z[k]);
        out += '\n';
    }
    out += "threshold\t";
    append_shortest(out, model.threshold);
    out += '\n';
    for (int j = 0; j < model.num_groups(); ++j) {
        out += "offset:" + model.group_names[static_cast<std::size_t>(j)] + '\t';
        append_shortest(out, model.group_offsets[j]);
        out += '\n';
    }
    return out;
}

LogisticModel parse_logistic(const std::string& text) {
    LogisticModel model;
    std::vector<double> beta_a, beta_z;
    std::vector<std::pair<std::string, double>> offsets;
    bool have_intercept = false, have_threshold = false;

    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error("model: missing tab in line '" + line + "'");
        const std::string name = line.substr(0, tab);
        const double value = parse_exact(line.substr(tab + 1), line);

        if (name == "intercept") {
            if (have_intercept) throw std::runtime_error("model: duplicate intercept");
            model.beta0 = value;
            have_intercept = true;
        } else if (name == "threshold") {
            if (have_threshold) throw std::runtime_error("model: duplicate threshold");
            model.threshold = value;
            have_threshold = true;
        } else if (name.rfind("group:", 0) == 0) {
            model.group_names.push_back(name.substr(6));
            beta_a.push_back(value);
        } else if (name.rfind("z:", 0) == 0) {
            model.feature_names.push_back(name.substr(2));
            beta_z.push_back(value);
        } else if (name.rfind("offset:", 0) == 0) {
            offsets.emplace_back(name.substr(7), value);
        } else {
            throw std::runtime_error("model: unknown entry '" + name + "'");
        }
    }
    if (!have_intercept) throw std::runtime_error("model: missing intercept");
    if (model.group_names.empty()) throw std::runtime_error("model: no group coefficients");

    model.beta_a = Eigen::Map<const Eigen::VectorXd>(beta_a.data(),
                                                     static_cast<Eigen::Index>(beta_a.size()));
    model.beta_z = Eigen::Map<const Eigen::VectorXd>(beta_z.data(),
                                                     static_cast<Eigen::Index>(beta_z.size()));
    model.group_offsets = Eigen::VectorXd::Zero(model.num_groups());
    for (const auto& [gname, value] : offsets) {
        const auto it = std::find(model.group_names.begin(), model.group_names.end(), gname);
        if (it == model.group_names.end())
            throw std::runtime_error("model: offset for unknown group '" + gname + "'");
        model.group_offsets[it - model.group_names.begin()] = value;
    }
    return model;
}

} // namespace equiboot
