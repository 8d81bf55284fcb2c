#include "equiboot/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace equiboot {

namespace {

void check_rows(const std::vector<int>& pred, const std::vector<int>& truth,
                const std::vector<int>& groups, int num_groups) {
    if (pred.size() != truth.size() || pred.size() != groups.size())
        throw std::invalid_argument("metrics: pred/truth/group length mismatch");
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] != 0 && pred[i] != 1)
            throw std::invalid_argument("metrics: prediction not in {0, 1}");
        if (truth[i] != 0 && truth[i] != 1)
            throw std::invalid_argument("metrics: label not in {0, 1}");
        if (groups[i] < 0 || groups[i] >= num_groups)
            throw std::invalid_argument("metrics: group index out of range");
    }
}

double range_of_defined(const Eigen::VectorXd& v) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Eigen::Index j = 0; j < v.size(); ++j) {
        if (std::isnan(v[j])) continue;
        lo = std::min(lo, v[j]);
        hi = std::max(hi, v[j]);
    }
    return hi >= lo ? hi - lo : 0.0;
}

} // namespace

GroupMetrics group_sens_spec(const std::vector<int>& pred, const std::vector<int>& truth,
                             const std::vector<int>& groups, int num_groups) {
    check_rows(pred, truth, groups, num_groups);

    Eigen::VectorXi tp = Eigen::VectorXi::Zero(num_groups);
    Eigen::VectorXi tn = Eigen::VectorXi::Zero(num_groups);
    GroupMetrics m;
    m.pos_count = Eigen::VectorXi::Zero(num_groups);
    m.neg_count = Eigen::VectorXi::Zero(num_groups);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const int a = groups[i];
        if (truth[i] == 1) {
            ++m.pos_count[a];
            tp[a] += pred[i];
        } else {
            ++m.neg_count[a];
            tn[a] += 1 - pred[i];
        }
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    m.sens.resize(num_groups);
    m.spec.resize(num_groups);
    for (int a = 0; a < num_groups; ++a) {
        m.sens[a] = m.pos_count[a] > 0 ? static_cast<double>(tp[a]) / m.pos_count[a] : nan;
        m.spec[a] = m.neg_count[a] > 0 ? static_cast<double>(tn[a]) / m.neg_count[a] : nan;
    }
    m.sens_range = range_of_defined(m.sens);
    m.spec_range = range_of_defined(m.spec);
    return m;
}

double equal_odds_gap(const GroupMetrics& metrics) {
    return std::max(metrics.sens_range, metrics.spec_range);
}

double calibrate_threshold(const std::vector<double>& scores, const std::vector<int>& labels,
                           double target_spec) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("calibrate: score/label length mismatch");
    if (!(target_spec >= 0.0 && target_spec <= 1.0))
        throw std::invalid_argument("calibrate: target specificity outside [0, 1]");

    std::vector<double> neg;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] == 0) {
            if (!std::isfinite(scores[i]))
                throw std::invalid_argument("calibrate: non-finite score");
            neg.push_back(scores[i]);
        } else if (labels[i] != 1) {
            throw std::invalid_argument("calibrate: label not in {0, 1}");
        }
    }
    if (neg.empty()) throw std::invalid_argument("calibrate: no negative rows");

    std::sort(neg.begin(), neg.end());
    const double need = target_spec * static_cast<double>(neg.size());
    // #{negatives strictly below neg[i]} == i at each first occurrence
    for (std::size_t i = 0; i < neg.size(); ++i) {
        if (i > 0 && neg[i] == neg[i - 1]) continue;
        if (static_cast<double>(i) >= need) return neg[i];
    }
    return std::nextafter(neg.back(), std::numeric_limits<double>::infinity());
}

std::vector<double> group_thresholds(const std::vector<double>& scores,
                                     const std::vector<int>& labels,
                                     const std::vector<int>& groups, int num_groups,
                                     const std::vector<double>& target_specs) {
    if (scores.size() != labels.size() || scores.size() != groups.size())
        throw std::invalid_argument("calibrate: score/label/group length mismatch");
    if (static_cast<int>(target_specs.size()) != num_groups)
        throw std::invalid_argument("calibrate: one target per group required");

    std::vector<double> thresholds(static_cast<std::size_t>(num_groups));
    for (int a = 0; a < num_groups; ++a) {
        std::vector<double> s;
        std::vector<int> y;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (groups[i] == a) {
                s.push_back(scores[i]);
                y.push_back(labels[i]);
            }
        }
        try {
            thresholds[static_cast<std::size_t>(a)] =
                calibrate_threshold(s, y, target_specs[static_cast<std::size_t>(a)]);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("calibrate: group " + std::to_string(a) + ": " + e.what());
        }
    }
    return thresholds;
}

namespace {

std::string fmt4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

} // namespace

std::string metrics_to_csv(const GroupMetrics& metrics,
                           const std::vector<std::string>& group_names) {
    if (static_cast<int>(group_names.size()) != metrics.num_groups())
        throw std::invalid_argument("metrics: group name count mismatch");
    std::string out = "group,sensitivity,specificity,positives,negatives\n";
    for (int a = 0; a < metrics.num_groups(); ++a) {
        out += group_names[static_cast<std::size_t>(a)];
        out += ',' + fmt4(metrics.sens[a]) + ',' + fmt4(metrics.spec[a]);
        out += ',' + std::to_string(metrics.pos_count[a]) + ',' +
               std::to_string(metrics.neg_count[a]) + '\n';
    }
    out += "range," + fmt4(metrics.sens_range) + ',' + fmt4(metrics.spec_range) + ",,\n";
    return out;
}

std::string metrics_to_text(const GroupMetrics& metrics,
                            const std::vector<std::string>& group_names) {
    if (static_cast<int>(group_names.size()) != metrics.num_groups())
        throw std::invalid_argument("metrics: group name count mismatch");

    std::vector<std::string> headers{"metric"};
    for (const auto& g : group_names) headers.push_back(g);
    headers.emplace_back("range");

    std::vector<std::vector<std::string>> rows;
    rows.push_back({"sens"});
    rows.push_back({"spec"});
    rows.push_back({"n_pos"});
    rows.push_back({"n_neg"});
    for (int a = 0; a < metrics.num_groups(); ++a) {
        rows[0].push_back(fmt4(metrics.sens[a]));
        rows[1].push_back(fmt4(metrics.spec[a]));
        rows[2].push_back(std::to_string(metrics.pos_count[a]));
        rows[3].push_back(std::to_string(metrics.neg_count[a]));
    }
    rows[0].push_back(fmt4(metrics.sens_range));
    rows[1].push_back(fmt4(metrics.spec_range));
    rows[2].emplace_back("");
    rows[3].emplace_back("");

    std::vector<std::size_t> width(headers.size());
    for (std::size_t c = 0; c < headers.size(); ++c) {
        width[c] = headers[c].size();
        for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
    }
    std::string out;
    const auto emit = [&](const std::vector<std::string>& cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c > 0) out += "  ";
            out.append(width[c] - cells[c].size(), ' ');
            out += cells[c];
        }
        out += '\n';
    };
    emit(headers);
    for (const auto& row : rows) emit(row);
    return out;
}

} // namespace equiboot
