#include "equiboot/resample.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "equiboot/rng.hpp"

namespace equiboot {

namespace {

// count draws from pool appended to out; without replacement keeps pool order.
void draw(const std::vector<Eigen::Index>& pool, Eigen::Index count, bool with_replacement,
          Rng& rng, std::vector<Eigen::Index>& out) {
    const auto m = static_cast<Eigen::Index>(pool.size());
    if (with_replacement) {
        std::uniform_int_distribution<Eigen::Index> pick(0, m - 1);
        for (Eigen::Index i = 0; i < count; ++i)
            out.push_back(pool[static_cast<std::size_t>(pick(rng))]);
        return;
    }
    // Partial Fisher-Yates over positions, then restore source order.
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(m));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    for (Eigen::Index i = 0; i < count; ++i) {
        std::uniform_int_distribution<Eigen::Index> pick(i, m - 1);
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
    }
    idx.resize(static_cast<std::size_t>(count));
    std::sort(idx.begin(), idx.end());
    for (Eigen::Index c : idx) out.push_back(pool[static_cast<std::size_t>(c)]);
}

} // namespace

Dataset blind_bootstrap(const TrainTestValSplit& split, const Dataset& data,
                        const BootstrapSpec& spec) {
    if (spec.n_pos < 0 || spec.n_neg < 0)
        throw std::invalid_argument("bootstrap: negative sample count");

    std::vector<Eigen::Index> pos, neg;
    for (int a = 0; a < split.num_groups; ++a) {
        const auto& p = split.train_cell(a, 1);
        const auto& n = split.train_cell(a, 0);
        pos.insert(pos.end(), p.begin(), p.end());
        neg.insert(neg.end(), n.begin(), n.end());
    }
    if (spec.n_pos > 0 && pos.empty())
        throw std::invalid_argument("bootstrap: no positive training rows");
    if (spec.n_neg > 0 && neg.empty())
        throw std::invalid_argument("bootstrap: no negative training rows");

    Rng rng(spec.seed);
    std::vector<Eigen::Index> rows;
    rows.reserve(static_cast<std::size_t>(spec.n_pos + spec.n_neg));
    draw(pos, spec.n_pos, true, rng, rows);
    const bool neg_replace = spec.replacement == ReplacementPolicy::always ||
                             spec.n_neg > static_cast<Eigen::Index>(neg.size());
    draw(neg, spec.n_neg, neg_replace, rng, rows);
    return take_rows(data, rows);
}

Dataset equity_bootstrap(const TrainTestValSplit& split, const Dataset& data,
                         const BootstrapSpec& spec) {
    if (spec.m_per_cell <= 0)
        throw std::invalid_argument("bootstrap: m_per_cell must be positive");

    Rng rng(spec.seed);
    std::vector<Eigen::Index> rows;
    rows.reserve(static_cast<std::size_t>(spec.m_per_cell) * 2 *
                 static_cast<std::size_t>(split.num_groups));
    for (int a = 0; a < split.num_groups; ++a) {
        for (int y = 0; y < 2; ++y) {
            const auto& cell = split.train_cell(a, y);
            if (cell.empty())
                throw std::invalid_argument("bootstrap: empty training cell (group " +
                                            std::to_string(a) + ", label " + std::to_string(y) +
                                            ")");
            const bool replace = spec.replacement == ReplacementPolicy::always ||
                                 spec.m_per_cell > static_cast<Eigen::Index>(cell.size());
            draw(cell, spec.m_per_cell, replace, rng, rows);
        }
    }
    return take_rows(data, rows);
}

} // namespace equiboot
