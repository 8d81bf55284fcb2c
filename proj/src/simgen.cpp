#include "equiboot/simgen.hpp"

#include <Eigen/Cholesky>
#include <random>
#include <stdexcept>

#include "equiboot/logit.hpp"

namespace equiboot {

void SimConfig::validate() const {
    if (n < 1) throw std::invalid_argument("sim: n must be positive");
    if (p < 1) throw std::invalid_argument("sim: p must be positive");
    if (num_groups < 2) throw std::invalid_argument("sim: need at least two groups");
}

TrueTheta make_theta(const SimConfig& cfg, Rng& rng) {
    std::uniform_real_distribution<double> unif(-0.1, 0.1);
    TrueTheta theta;
    theta.beta0 = unif(rng);
    theta.beta_a.resize(cfg.num_groups);
    int fixed = 0;
    if (cfg.num_groups == 3 || cfg.num_groups == 10) {
        theta.beta_a[0] = -0.5;
        theta.beta_a[1] = 0.2;
        theta.beta_a[2] = 1.0;
        fixed = 3;
    }
    for (int a = fixed; a < cfg.num_groups; ++a) theta.beta_a[a] = unif(rng);
    theta.beta_z.resize(cfg.p);
    for (int j = 0; j < cfg.p; ++j) theta.beta_z[j] = unif(rng);
    return theta;
}

ZDistribution make_z_distribution(const SimConfig& cfg, Rng& rng) {
    ZDistribution dist;
    dist.mode = cfg.z_mode;
    dist.p = cfg.p;
    if (cfg.z_mode == ZMode::discrete) return dist;

    std::normal_distribution<double> gauss(0.0, 1.0);
    dist.mean = Eigen::VectorXd::Zero(cfg.p);
    if (cfg.mean_mode == MeanMode::random)
        for (int j = 0; j < cfg.p; ++j) dist.mean[j] = gauss(rng);

    if (cfg.cov_mode == CovMode::identity) {
        dist.chol_l = Eigen::MatrixXd::Identity(cfg.p, cfg.p);
        return dist;
    }

    Eigen::MatrixXd phi(cfg.p, cfg.p);
    for (int i = 0; i < cfg.p; ++i)
        for (int j = 0; j < cfg.p; ++j) phi(i, j) = gauss(rng);
    Eigen::MatrixXd sigma = phi.transpose() * phi;
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) {
        sigma.diagonal().array() += 1e-10;
        llt.compute(sigma);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("sim: covariance factorization failed");
    }
    dist.chol_l = llt.matrixL();
    return dist;
}

Eigen::MatrixXd ZDistribution::sample(Eigen::Index rows, Rng& rng) const {
    Eigen::MatrixXd z(rows, p);
    if (mode == ZMode::discrete) {
        std::bernoulli_distribution coin(0.5);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (int j = 0; j < p; ++j) z(i, j) = coin(rng) ? 1.0 : 0.0;
        return z;
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (int j = 0; j < p; ++j) z(i, j) = gauss(rng);
    z = z * chol_l.transpose();
    z.rowwise() += mean.transpose();
    return z;
}

Eigen::MatrixXd gen_z(const SimConfig& cfg, Rng& rng) {
    return make_z_distribution(cfg, rng).sample(cfg.n, rng);
}

std::vector<int> gen_groups(Eigen::Index n, int num_groups, Rng& rng) {
    std::uniform_int_distribution<int> pick(0, num_groups - 1);
    std::vector<int> groups(static_cast<std::size_t>(n));
    for (auto& g : groups) g = pick(rng);
    return groups;
}

std::vector<int> gen_labels(const Eigen::MatrixXd& z, const std::vector<int>& groups,
                            const TrueTheta& theta, Rng& rng) {
    const Eigen::Index n = z.rows();
    Eigen::VectorXd eta = z * theta.beta_z;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const double lin = theta.beta0 + theta.beta_a[groups[static_cast<std::size_t>(i)]] + eta[i];
        labels[static_cast<std::size_t>(i)] = unif(rng) < sigmoid(lin) ? 1 : 0;
    }
    return labels;
}

SimData simulate_dataset(const SimConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);

    SimData out;
    out.theta = make_theta(cfg, rng);
    out.data.group = gen_groups(cfg.n, cfg.num_groups, rng);
    out.z_dist = make_z_distribution(cfg, rng);
    out.data.z = out.z_dist.sample(cfg.n, rng);
    out.data.label = gen_labels(out.data.z, out.data.group, out.theta, rng);

    out.data.feature_names.reserve(static_cast<std::size_t>(cfg.p));
    for (int j = 0; j < cfg.p; ++j) out.data.feature_names.push_back("z" + std::to_string(j + 1));
    out.data.group_names.reserve(static_cast<std::size_t>(cfg.num_groups));
    for (int a = 0; a < cfg.num_groups; ++a) out.data.group_names.push_back("g" + std::to_string(a + 1));
    return out;
}

} // namespace equiboot
