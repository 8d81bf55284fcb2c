#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "equiboot/dataset.hpp"
#include "equiboot/rng.hpp"

namespace testutil {

// Dataset with the given per-row (group, label) pairs; z defaults to the row
// index in column 0 so resampled rows stay traceable to their source.
inline equiboot::Dataset tagged_dataset(const std::vector<std::pair<int, int>>& rows,
                                        int num_groups, Eigen::Index p = 1) {
    equiboot::Dataset d;
    const auto n = static_cast<Eigen::Index>(rows.size());
    d.z.resize(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        d.z(i, 0) = static_cast<double>(i);
        for (Eigen::Index j = 1; j < p; ++j) d.z(i, j) = 0.0;
        d.group.push_back(rows[static_cast<std::size_t>(i)].first);
        d.label.push_back(rows[static_cast<std::size_t>(i)].second);
    }
    for (int a = 0; a < num_groups; ++a) d.group_names.push_back("g" + std::to_string(a + 1));
    for (Eigen::Index j = 0; j < p; ++j) d.feature_names.push_back("z" + std::to_string(j + 1));
    return d;
}

// Random dataset with every (group, label) cell nonempty.
inline equiboot::Dataset random_cells(equiboot::Rng& rng, int num_groups, Eigen::Index min_cell,
                                      Eigen::Index max_cell, Eigen::Index p, bool binary_z) {
    std::uniform_int_distribution<Eigen::Index> cell_size(min_cell, max_cell);
    std::vector<std::pair<int, int>> rows;
    for (int a = 0; a < num_groups; ++a)
        for (int y = 0; y < 2; ++y) {
            const Eigen::Index m = cell_size(rng);
            for (Eigen::Index i = 0; i < m; ++i) rows.emplace_back(a, y);
        }
    std::shuffle(rows.begin(), rows.end(), rng);

    equiboot::Dataset d;
    const auto n = static_cast<Eigen::Index>(rows.size());
    d.z.resize(n, p);
    if (binary_z) {
        std::bernoulli_distribution coin(0.5);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < p; ++j) d.z(i, j) = coin(rng) ? 1.0 : 0.0;
    } else {
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < p; ++j) d.z(i, j) = gauss(rng);
    }
    for (const auto& [a, y] : rows) {
        d.group.push_back(a);
        d.label.push_back(y);
    }
    for (int a = 0; a < num_groups; ++a) d.group_names.push_back("g" + std::to_string(a + 1));
    for (Eigen::Index j = 0; j < p; ++j) d.feature_names.push_back("z" + std::to_string(j + 1));
    return d;
}

} // namespace testutil
