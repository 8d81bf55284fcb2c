#include "equiboot/odds.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "equiboot/logit.hpp"

namespace equiboot {

double mad_from_one(const Eigen::MatrixXd& values, bool include_diagonal, int* undefined_count) {
    if (values.rows() != values.cols())
        throw std::invalid_argument("odds: ratio matrix must be square");
    double sum = 0.0;
    Eigen::Index considered = 0;
    int undefined = 0;
    for (Eigen::Index j = 0; j < values.rows(); ++j) {
        for (Eigen::Index k = 0; k < values.cols(); ++k) {
            if (j == k && !include_diagonal) continue;
            if (std::isnan(values(j, k))) {
                ++undefined;
                continue;
            }
            sum += std::abs(values(j, k) - 1.0);
            ++considered;
        }
    }
    if (undefined_count) *undefined_count = undefined;
    if (considered == 0) return std::numeric_limits<double>::quiet_NaN();
    return sum / static_cast<double>(considered);
}

namespace {

OddsRatioMatrix from_odds(const Eigen::VectorXd& odds, OrEstimator estimator, bool mad_diagonal) {
    const auto a = odds.size();
    OddsRatioMatrix m;
    m.estimator = estimator;
    m.values.resize(a, a);
    for (Eigen::Index j = 0; j < a; ++j) {
        for (Eigen::Index k = 0; k < a; ++k) {
            if (j == k)
                m.values(j, k) = 1.0;
            else
                m.values(j, k) = odds[j] / odds[k]; // NaN odds propagate
        }
    }
    m.diagonal_included = mad_diagonal;
    m.mad_from_one = mad_from_one(m.values, mad_diagonal, &m.num_undefined);
    return m;
}

} // namespace

OddsRatioMatrix empirical_or(const std::vector<int>& labels, const std::vector<int>& groups,
                             int num_groups, bool mad_diagonal) {
    if (labels.size() != groups.size())
        throw std::invalid_argument("odds: label/group length mismatch");
    Eigen::VectorXd pos = Eigen::VectorXd::Zero(num_groups);
    Eigen::VectorXd neg = Eigen::VectorXd::Zero(num_groups);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (groups[i] < 0 || groups[i] >= num_groups)
            throw std::invalid_argument("odds: group index out of range");
        if (labels[i] == 1)
            pos[groups[i]] += 1.0;
        else if (labels[i] == 0)
            neg[groups[i]] += 1.0;
        else
            throw std::invalid_argument("odds: label not in {0, 1}");
    }
    Eigen::VectorXd odds(num_groups);
    for (int j = 0; j < num_groups; ++j)
        odds[j] = (pos[j] > 0.0 && neg[j] > 0.0) ? pos[j] / neg[j]
                                                 : std::numeric_limits<double>::quiet_NaN();
    return from_odds(odds, OrEstimator::EOR, mad_diagonal);
}

OddsRatioMatrix conditional_lor(const LogisticModel& model, bool mad_diagonal) {
    const int a = model.num_groups();
    Eigen::VectorXd odds(a);
    for (int j = 0; j < a; ++j) odds[j] = std::exp(model.beta_a[j] + model.group_offsets[j]);
    return from_odds(odds, OrEstimator::LOR, mad_diagonal);
}

double mc_group_prob(const LogisticModel& model, int group, const Eigen::MatrixXd& z_samples) {
    if (group < 0 || group >= model.num_groups())
        throw std::invalid_argument("odds: group index out of range");
    if (z_samples.cols() != model.n_features())
        throw std::invalid_argument("odds: z sample width mismatch");
    if (z_samples.rows() == 0) throw std::invalid_argument("odds: no z samples");

    const double base = model.beta0 + model.group_offsets[group] + model.beta_a[group];
    const Eigen::VectorXd eta = z_samples * model.beta_z;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) sum += sigmoid(base + eta[i]);
    return sum / static_cast<double>(eta.size());
}

OddsRatioMatrix mc_lor(const LogisticModel& model, const Eigen::MatrixXd& z_samples,
                       bool mad_diagonal) {
    const int a = model.num_groups();
    Eigen::VectorXd odds(a);
    for (int j = 0; j < a; ++j) {
        const double p = mc_group_prob(model, j, z_samples);
        odds[j] = (p > 0.0 && p < 1.0) ? p / (1.0 - p) : std::numeric_limits<double>::quiet_NaN();
    }
    auto m = from_odds(odds, OrEstimator::MCLOR, mad_diagonal);
    return m;
}

OddsRatioMatrix mc_lor(const LogisticModel& model, const ZSampler& sampler, Eigen::Index nu,
                       Rng& rng, bool mad_diagonal) {
    if (nu <= 0) throw std::invalid_argument("odds: sample count must be positive");
    return mc_lor(model, sampler(nu, rng), mad_diagonal);
}

OddsRatioMatrix mc_lor_empirical(const LogisticModel& model, const Dataset& data,
                                 Eigen::Index nu, Rng& rng, bool mad_diagonal) {
    if (nu <= 0) throw std::invalid_argument("odds: sample count must be positive");
    const int a = model.num_groups();
    if (data.num_groups() != a) throw std::invalid_argument("odds: group count mismatch");

    const auto part = partition_by_group_label(data);
    Eigen::VectorXd odds(a);
    for (int j = 0; j < a; ++j) {
        std::vector<Eigen::Index> pool = part.cell(j, 0);
        const auto& pos = part.cell(j, 1);
        pool.insert(pool.end(), pos.begin(), pos.end());
        if (pool.empty()) {
            odds[j] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        const double base = model.beta0 + model.group_offsets[j] + model.beta_a[j];
        double sum = 0.0;
        for (Eigen::Index i = 0; i < nu; ++i) {
            const Eigen::Index r = pool[pick(rng)];
            sum += sigmoid(base + data.z.row(r).dot(model.beta_z));
        }
        const double p = sum / static_cast<double>(nu);
        odds[j] = (p > 0.0 && p < 1.0) ? p / (1.0 - p) : std::numeric_limits<double>::quiet_NaN();
    }
    return from_odds(odds, OrEstimator::MCLOR, mad_diagonal);
}

LogisticModel intercept_adjust(const LogisticModel& model, const Dataset& reference) {
    const int a = model.num_groups();
    if (reference.num_groups() != a)
        throw std::invalid_argument("odds: reference group count mismatch");

    Eigen::VectorXd n0 = Eigen::VectorXd::Zero(a);
    Eigen::VectorXd n1 = Eigen::VectorXd::Zero(a);
    for (Eigen::Index i = 0; i < reference.n_rows(); ++i) {
        if (reference.label[static_cast<std::size_t>(i)] == 1)
            n1[reference.group[static_cast<std::size_t>(i)]] += 1.0;
        else
            n0[reference.group[static_cast<std::size_t>(i)]] += 1.0;
    }
    LogisticModel adjusted = model;
    for (int j = 0; j < a; ++j) {
        if (n0[j] <= 0.0 || n1[j] <= 0.0)
            throw std::invalid_argument("odds: group " + std::to_string(j) +
                                        " lacks rows of both labels in the reference data");
        // log(zeta_1/zeta_0) with zeta_y = fraction of the group labeled 1-y
        adjusted.group_offsets[j] = std::log(n0[j] / n1[j]);
    }
    return adjusted;
}

double threshold_equiv(double beta0, double beta0_new, double tau) {
    if (!(tau > 0.0 && tau < 1.0))
        throw std::invalid_argument("odds: threshold must lie in (0, 1)");
    return 1.0 / (std::exp(beta0_new - beta0) * (1.0 - tau) / tau + 1.0);
}

std::string or_matrix_to_csv(const OddsRatioMatrix& matrix,
                             const std::vector<std::string>& group_names) {
    const int a = matrix.num_groups();
    if (static_cast<int>(group_names.size()) != a)
        throw std::invalid_argument("odds: group name count mismatch");

    const auto append_value = [](std::string& out, double v) {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof(buf), v);
        out.append(buf, res.ptr);
    };

    std::string out = "group";
    for (const auto& g : group_names) out += ',' + g;
    out += '\n';
    for (int j = 0; j < a; ++j) {
        out += group_names[static_cast<std::size_t>(j)];
        for (int k = 0; k < a; ++k) {
            out += ',';
            append_value(out, matrix.values(j, k));
        }
        out += '\n';
    }
    out += "mad_from_one,";
    append_value(out, matrix.mad_from_one);
    for (int k = 1; k < a; ++k) out += ',';
    out += '\n';
    return out;
}

} // namespace equiboot
