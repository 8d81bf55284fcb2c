#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "equiboot/experiment.hpp"

namespace py = pybind11;
using namespace equiboot;

namespace {

Dataset make_dataset(const Eigen::MatrixXd& z, const std::vector<int>& group,
                     const std::vector<int>& label, int num_groups) {
    Dataset d;
    d.z = z;
    d.group = group;
    d.label = label;
    if (num_groups <= 0)
        for (int g : group) num_groups = std::max(num_groups, g + 1);
    for (int a = 0; a < num_groups; ++a) d.group_names.push_back("g" + std::to_string(a + 1));
    for (Eigen::Index j = 0; j < z.cols(); ++j)
        d.feature_names.push_back("z" + std::to_string(j + 1));
    d.validate();
    return d;
}

py::dict dataset_to_dict(const Dataset& d) {
    py::dict out;
    out["z"] = d.z;
    out["group"] = d.group;
    out["label"] = d.label;
    return out;
}

TrainTestValSplit all_train_split(const Dataset& d) {
    return sequential_split(partition_by_group_label(d), {1.0, 0.0, 0.0});
}

} // namespace

PYBIND11_MODULE(equiboot, m) {
    m.doc() = "equity-directed bootstrapping for imbalanced binary classification";

    py::class_<LogisticModel>(m, "LogisticModel")
        .def_readonly("beta0", &LogisticModel::beta0)
        .def_readonly("beta_a", &LogisticModel::beta_a)
        .def_readonly("beta_z", &LogisticModel::beta_z)
        .def_readonly("group_offsets", &LogisticModel::group_offsets)
        .def_readwrite("threshold", &LogisticModel::threshold)
        .def_readonly("converged", &LogisticModel::converged)
        .def_readonly("iterations", &LogisticModel::iterations)
        .def("__repr__", [](const LogisticModel& mdl) {
            return "<LogisticModel groups=" + std::to_string(mdl.num_groups()) +
                   " features=" + std::to_string(mdl.n_features()) + ">";
        });

    py::class_<NaiveBayesModel>(m, "NaiveBayesModel")
        .def_readonly("prior", &NaiveBayesModel::prior)
        .def_readonly("group_cond", &NaiveBayesModel::group_cond)
        .def_readonly("feature_cond", &NaiveBayesModel::feature_cond);

    m.def(
        "gen",
        [](Eigen::Index n, int p, int num_groups, const std::string& z_mode,
           const std::string& mean_mode, const std::string& cov_mode, std::uint64_t seed) {
            SimConfig cfg;
            cfg.n = n;
            cfg.p = p;
            cfg.num_groups = num_groups;
            if (z_mode == "discrete")
                cfg.z_mode = ZMode::discrete;
            else if (z_mode == "continuous")
                cfg.z_mode = ZMode::continuous;
            else
                throw std::invalid_argument("z_mode must be discrete or continuous");
            cfg.mean_mode = mean_mode == "random" ? MeanMode::random : MeanMode::zero;
            cfg.cov_mode = cov_mode == "random" ? CovMode::random : CovMode::identity;
            cfg.seed = seed;
            return dataset_to_dict(simulate_dataset(cfg).data);
        },
        py::arg("n"), py::arg("p"), py::arg("num_groups") = 3, py::arg("z_mode") = "discrete",
        py::arg("mean_mode") = "zero", py::arg("cov_mode") = "identity", py::arg("seed") = 1,
        "Generate one synthetic dataset as {'z', 'group', 'label'}.");

    m.def(
        "equity_bootstrap",
        [](const Eigen::MatrixXd& z, const std::vector<int>& group, const std::vector<int>& label,
           Eigen::Index m_per_cell, std::uint64_t seed, int num_groups) {
            const Dataset d = make_dataset(z, group, label, num_groups);
            BootstrapSpec spec;
            spec.mode = BootstrapMode::equity;
            spec.m_per_cell = m_per_cell;
            spec.seed = seed;
            return dataset_to_dict(equity_bootstrap(all_train_split(d), d, spec));
        },
        py::arg("z"), py::arg("group"), py::arg("label"), py::arg("m_per_cell"),
        py::arg("seed") = 0, py::arg("num_groups") = 0,
        "Draw exactly m_per_cell rows from every (group, label) cell.");

    m.def(
        "blind_bootstrap",
        [](const Eigen::MatrixXd& z, const std::vector<int>& group, const std::vector<int>& label,
           Eigen::Index n_pos, Eigen::Index n_neg, std::uint64_t seed, int num_groups) {
            const Dataset d = make_dataset(z, group, label, num_groups);
            BootstrapSpec spec;
            spec.mode = BootstrapMode::blind;
            spec.n_pos = n_pos;
            spec.n_neg = n_neg;
            spec.seed = seed;
            return dataset_to_dict(blind_bootstrap(all_train_split(d), d, spec));
        },
        py::arg("z"), py::arg("group"), py::arg("label"), py::arg("n_pos"), py::arg("n_neg"),
        py::arg("seed") = 0, py::arg("num_groups") = 0,
        "Class-balanced group-blind bootstrap (positives first, then negatives).");

    m.def(
        "fit_logistic",
        [](const Eigen::MatrixXd& z, const std::vector<int>& group, const std::vector<int>& label,
           double tol_grad, int max_iter, double ridge, int num_groups) {
            FitOptions opts;
            opts.tol_grad = tol_grad;
            opts.max_iter = max_iter;
            opts.ridge = ridge;
            return fit_logistic(make_dataset(z, group, label, num_groups), opts);
        },
        py::arg("z"), py::arg("group"), py::arg("label"), py::arg("tol_grad") = 0.0,
        py::arg("max_iter") = 100, py::arg("ridge") = 0.0, py::arg("num_groups") = 0,
        "Damped-Newton logistic regression on [1 | one-hot(group) | z].");

    m.def(
        "predict_proba",
        [](const LogisticModel& model, const Eigen::MatrixXd& z, const std::vector<int>& group) {
            std::vector<int> label(group.size(), 0);
            return predict_proba(model, make_dataset(z, group, label, model.num_groups()));
        },
        py::arg("model"), py::arg("z"), py::arg("group"));

    m.def(
        "fit_naive_bayes",
        [](const Eigen::MatrixXd& z, const std::vector<int>& group, const std::vector<int>& label,
           double smoothing, int num_groups) {
            return fit_naive_bayes(make_dataset(z, group, label, num_groups), smoothing);
        },
        py::arg("z"), py::arg("group"), py::arg("label"), py::arg("smoothing") = 1.0,
        py::arg("num_groups") = 0);

    m.def(
        "nb_posterior",
        [](const NaiveBayesModel& model, const Eigen::MatrixXd& z, const std::vector<int>& group) {
            if (static_cast<std::size_t>(z.rows()) != group.size())
                throw std::invalid_argument("z/group length mismatch");
            Eigen::VectorXd out(z.rows());
            for (Eigen::Index i = 0; i < z.rows(); ++i)
                out[i] = nb_posterior(model, group[static_cast<std::size_t>(i)], z.row(i));
            return out;
        },
        py::arg("model"), py::arg("z"), py::arg("group"));

    m.def(
        "group_metrics",
        [](const std::vector<int>& pred, const std::vector<int>& truth,
           const std::vector<int>& group, int num_groups) {
            if (num_groups <= 0)
                for (int g : group) num_groups = std::max(num_groups, g + 1);
            const GroupMetrics gm = group_sens_spec(pred, truth, group, num_groups);
            py::dict out;
            out["sens"] = gm.sens;
            out["spec"] = gm.spec;
            out["sens_range"] = gm.sens_range;
            out["spec_range"] = gm.spec_range;
            out["gap"] = equal_odds_gap(gm);
            return out;
        },
        py::arg("pred"), py::arg("truth"), py::arg("group"), py::arg("num_groups") = 0,
        "Per-group sensitivity/specificity, their ranges, and the equal odds gap.");

    m.def(
        "empirical_or",
        [](const std::vector<int>& label, const std::vector<int>& group, int num_groups,
           bool include_diagonal) {
            if (num_groups <= 0)
                for (int g : group) num_groups = std::max(num_groups, g + 1);
            const auto m_ = empirical_or(label, group, num_groups, include_diagonal);
            py::dict out;
            out["values"] = m_.values;
            out["mad_from_one"] = m_.mad_from_one;
            return out;
        },
        py::arg("label"), py::arg("group"), py::arg("num_groups") = 0,
        py::arg("include_diagonal") = false);

    m.def(
        "conditional_lor",
        [](const LogisticModel& model, bool include_diagonal) {
            const auto m_ = conditional_lor(model, include_diagonal);
            py::dict out;
            out["values"] = m_.values;
            out["mad_from_one"] = m_.mad_from_one;
            return out;
        },
        py::arg("model"), py::arg("include_diagonal") = false);

    m.def(
        "mc_lor",
        [](const LogisticModel& model, const Eigen::MatrixXd& z_samples, bool include_diagonal) {
            const auto m_ = mc_lor(model, z_samples, include_diagonal);
            py::dict out;
            out["values"] = m_.values;
            out["mad_from_one"] = m_.mad_from_one;
            return out;
        },
        py::arg("model"), py::arg("z_samples"), py::arg("include_diagonal") = false,
        "Monte Carlo odds ratios over a shared z sample set.");

    m.def(
        "intercept_adjust",
        [](const LogisticModel& model, const Eigen::MatrixXd& z, const std::vector<int>& group,
           const std::vector<int>& label) {
            return intercept_adjust(model, make_dataset(z, group, label, model.num_groups()));
        },
        py::arg("model"), py::arg("z"), py::arg("group"), py::arg("label"),
        "Set group offsets to the log sampling-rate correction from reference data.");

    m.def("threshold_equiv", &threshold_equiv, py::arg("beta0"), py::arg("beta0_new"),
          py::arg("tau"),
          "Threshold making {beta0, result} classify like {beta0_new, tau}.");

    m.def("calibrate_threshold", &calibrate_threshold, py::arg("scores"), py::arg("labels"),
          py::arg("target_spec"));

    m.def("serialize_logistic", &serialize_logistic, py::arg("model"));
    m.def("parse_logistic", &parse_logistic, py::arg("text"));
}
