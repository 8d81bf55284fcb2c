#include "equiboot/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include "equiboot/rng.hpp"

namespace equiboot {

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = {
        "discrete_a3",         "cont_zero_uncorr_a3", "cont_zero_corr_a3",
        "cont_rand_uncorr_a3", "cont_rand_corr_a3",   "discrete_a10",
        "cont_zero_uncorr_a10", "cont_zero_corr_a10", "cont_rand_uncorr_a10",
        "cont_rand_corr_a10"};
    return names;
}

SimConfig resolve_scenario(const std::string& name, const ExperimentConfig& cfg) {
    SimConfig sc = cfg.sim;
    std::string stem = name;
    if (stem.size() > 4 && stem.compare(stem.size() - 4, 4, "_a10") == 0) {
        sc.num_groups = 10;
        stem.resize(stem.size() - 4);
    } else if (stem.size() > 3 && stem.compare(stem.size() - 3, 3, "_a3") == 0) {
        sc.num_groups = 3;
        stem.resize(stem.size() - 3);
    } else {
        throw ConfigError("unknown scenario '" + name + "'");
    }

    if (stem == "discrete") {
        sc.z_mode = ZMode::discrete;
    } else {
        sc.z_mode = ZMode::continuous;
        if (stem == "cont_zero_uncorr") {
            sc.mean_mode = MeanMode::zero;
            sc.cov_mode = CovMode::identity;
        } else if (stem == "cont_zero_corr") {
            sc.mean_mode = MeanMode::zero;
            sc.cov_mode = CovMode::random;
        } else if (stem == "cont_rand_uncorr") {
            sc.mean_mode = MeanMode::random;
            sc.cov_mode = CovMode::identity;
        } else if (stem == "cont_rand_corr") {
            sc.mean_mode = MeanMode::random;
            sc.cov_mode = CovMode::random;
        } else {
            throw ConfigError("unknown scenario '" + name + "'");
        }
    }
    return sc;
}

int worker_threads() {
    const char* env = std::getenv("EQUIBOOT_THREADS");
    if (!env || !*env) return 1;
    int n = 0;
    const auto res = std::from_chars(env, env + std::strlen(env), n);
    if (res.ec != std::errc{} || *res.ptr != '\0' || n < 1)
        throw ConfigError("EQUIBOOT_THREADS must be a positive integer");
    return n;
}

// ---------------------------------------------------------------------------
// config file

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_line(const std::string& path, int lineno, const std::string& what) {
    throw ConfigError(path + ":" + std::to_string(lineno) + ": " + what);
}

long long parse_int(const std::string& v, const std::string& path, int lineno) {
    long long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        bad_line(path, lineno, "expected an integer, got '" + v + "'");
    return out;
}

std::uint64_t parse_uint(const std::string& v, const std::string& path, int lineno) {
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        bad_line(path, lineno, "expected a nonnegative integer, got '" + v + "'");
    return out;
}

double parse_num(const std::string& v, const std::string& path, int lineno) {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        bad_line(path, lineno, "expected a number, got '" + v + "'");
    return out;
}

bool parse_bool(const std::string& v, const std::string& path, int lineno) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    bad_line(path, lineno, "expected true/false, got '" + v + "'");
}

std::vector<std::string> parse_list(const std::string& v) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= v.size()) {
        const std::size_t comma = v.find(',', start);
        const std::string item =
            trim(comma == std::string::npos ? v.substr(start) : v.substr(start, comma - start));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

} // namespace

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");

    ExperimentConfig cfg;
    std::string section;
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;

        if (line.front() == '[') {
            if (line.back() != ']') bad_line(path, lineno, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "sim" && section != "bootstrap" && section != "fit" &&
                section != "metrics" && section != "data" && section != "split")
                bad_line(path, lineno, "unknown section [" + section + "]");
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) bad_line(path, lineno, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) bad_line(path, lineno, "empty key");

        if (section.empty()) {
            if (key == "mode") {
                if (value == "simulate")
                    cfg.mode = RunMode::simulate;
                else if (value == "dataset")
                    cfg.mode = RunMode::dataset;
                else
                    bad_line(path, lineno, "mode must be simulate or dataset");
            } else if (key == "scenarios") {
                cfg.scenarios = parse_list(value);
                const auto& known = scenario_names();
                for (const auto& s : cfg.scenarios)
                    if (s != "all" && std::find(known.begin(), known.end(), s) == known.end())
                        bad_line(path, lineno, "unknown scenario '" + s + "'");
            } else if (key == "replications") {
                cfg.replications = static_cast<int>(parse_int(value, path, lineno));
            } else if (key == "master_seed") {
                cfg.master_seed = parse_uint(value, path, lineno);
            } else if (key == "output_dir") {
                cfg.output_dir = value;
            } else {
                bad_line(path, lineno, "unknown key '" + key + "'");
            }
        } else if (section == "sim") {
            if (key == "n")
                cfg.sim.n = static_cast<Eigen::Index>(parse_int(value, path, lineno));
            else if (key == "p")
                cfg.sim.p = static_cast<int>(parse_int(value, path, lineno));
            else if (key == "num_groups")
                cfg.sim.num_groups = static_cast<int>(parse_int(value, path, lineno));
            else if (key == "z_mode") {
                if (value == "discrete")
                    cfg.sim.z_mode = ZMode::discrete;
                else if (value == "continuous")
                    cfg.sim.z_mode = ZMode::continuous;
                else
                    bad_line(path, lineno, "z_mode must be discrete or continuous");
            } else if (key == "mean_mode") {
                if (value == "zero")
                    cfg.sim.mean_mode = MeanMode::zero;
                else if (value == "random")
                    cfg.sim.mean_mode = MeanMode::random;
                else
                    bad_line(path, lineno, "mean_mode must be zero or random");
            } else if (key == "cov_mode") {
                if (value == "identity")
                    cfg.sim.cov_mode = CovMode::identity;
                else if (value == "random")
                    cfg.sim.cov_mode = CovMode::random;
                else
                    bad_line(path, lineno, "cov_mode must be identity or random");
            } else if (key == "seed") {
                cfg.sim.seed = parse_uint(value, path, lineno);
            } else {
                bad_line(path, lineno, "unknown key '" + key + "' in [sim]");
            }
        } else if (section == "bootstrap") {
            if (key == "mode") {
                if (value == "blind")
                    cfg.bootstrap.mode = BootstrapMode::blind;
                else if (value == "equity")
                    cfg.bootstrap.mode = BootstrapMode::equity;
                else
                    bad_line(path, lineno, "bootstrap mode must be blind or equity");
            } else if (key == "m_per_cell")
                cfg.bootstrap.m_per_cell = static_cast<Eigen::Index>(parse_int(value, path, lineno));
            else if (key == "n_pos")
                cfg.bootstrap.n_pos = static_cast<Eigen::Index>(parse_int(value, path, lineno));
            else if (key == "n_neg")
                cfg.bootstrap.n_neg = static_cast<Eigen::Index>(parse_int(value, path, lineno));
            else if (key == "replacement") {
                if (value == "automatic")
                    cfg.bootstrap.replacement = ReplacementPolicy::automatic;
                else if (value == "always")
                    cfg.bootstrap.replacement = ReplacementPolicy::always;
                else
                    bad_line(path, lineno, "replacement must be automatic or always");
            } else if (key == "m_max")
                cfg.m_max = static_cast<Eigen::Index>(parse_int(value, path, lineno));
            else
                bad_line(path, lineno, "unknown key '" + key + "' in [bootstrap]");
        } else if (section == "fit") {
            if (key == "tol_grad")
                cfg.fit.tol_grad = parse_num(value, path, lineno);
            else if (key == "max_iter")
                cfg.fit.max_iter = static_cast<int>(parse_int(value, path, lineno));
            else if (key == "ridge")
                cfg.fit.ridge = parse_num(value, path, lineno);
            else if (key == "verbose")
                cfg.fit.verbose = parse_bool(value, path, lineno);
            else
                bad_line(path, lineno, "unknown key '" + key + "' in [fit]");
        } else if (section == "metrics") {
            if (key == "target_spec")
                cfg.target_spec = parse_num(value, path, lineno);
            else if (key == "mclor_nu")
                cfg.mclor_nu = static_cast<Eigen::Index>(parse_int(value, path, lineno));
            else if (key == "mad_diagonal")
                cfg.mad_diagonal = parse_bool(value, path, lineno);
            else
                bad_line(path, lineno, "unknown key '" + key + "' in [metrics]");
        } else if (section == "data") {
            if (key == "group_column")
                cfg.schema.group_column = value;
            else if (key == "label_column")
                cfg.schema.label_column = value;
            else
                bad_line(path, lineno, "unknown key '" + key + "' in [data]");
        } else { // split
            if (key == "train")
                cfg.split_fractions[0] = parse_num(value, path, lineno);
            else if (key == "test")
                cfg.split_fractions[1] = parse_num(value, path, lineno);
            else if (key == "val")
                cfg.split_fractions[2] = parse_num(value, path, lineno);
            else
                bad_line(path, lineno, "unknown key '" + key + "' in [split]");
        }
    }

    if (cfg.replications < 1) throw ConfigError(path + ": replications must be >= 1");
    if (cfg.mclor_nu < 1) throw ConfigError(path + ": mclor_nu must be >= 1");
    if (!(cfg.target_spec >= 0.0 && cfg.target_spec <= 1.0))
        throw ConfigError(path + ": target_spec must lie in [0, 1]");
    double frac_sum = 0.0;
    for (double f : cfg.split_fractions) {
        if (!(f >= 0.0)) throw ConfigError(path + ": split fractions must be nonnegative");
        frac_sum += f;
    }
    if (std::abs(frac_sum - 1.0) > 1e-12)
        throw ConfigError(path + ": split fractions must sum to 1");
    return cfg;
}

// ---------------------------------------------------------------------------
// simulation study

namespace {

struct RepStats {
    std::array<double, 7> excl{};
    std::array<double, 7> incl{};
};

// One replication: raw-data estimates, equity refit, intercept adjustment.
RepStats run_replication(const ExperimentConfig& cfg, const std::string& scenario,
                         int canonical_index, int rep) {
    const std::uint64_t rep_seed =
        derive_seed(cfg.master_seed, static_cast<std::uint64_t>(canonical_index),
                    static_cast<std::uint64_t>(rep));

    SimConfig sc = resolve_scenario(scenario, cfg);
    sc.seed = derive_seed(rep_seed, 0);
    const SimData sim = simulate_dataset(sc);
    const int a = sc.num_groups;

    std::array<OddsRatioMatrix, 7> mats;
    mats[0] = empirical_or(sim.data.label, sim.data.group, a);
    const LogisticModel lr = fit_logistic(sim.data, cfg.fit);
    mats[1] = conditional_lor(lr);

    Rng mc_rng(derive_seed(rep_seed, 2));
    // one shared z sample set: common random numbers across groups, models
    // and the adjusted model
    const Eigen::MatrixXd z_samples = sim.z_dist.sample(cfg.mclor_nu, mc_rng);
    mats[2] = mc_lor(lr, z_samples);

    const auto part = partition_by_group_label(sim.data);
    const auto split = sequential_split(part, {1.0, 0.0, 0.0});
    BootstrapSpec bs = cfg.bootstrap;
    bs.mode = BootstrapMode::equity;
    if (bs.m_per_cell <= 0) bs.m_per_cell = 800;
    bs.seed = derive_seed(rep_seed, 1);
    const Dataset equity = equity_bootstrap(split, sim.data, bs);

    mats[3] = empirical_or(equity.label, equity.group, a);
    const LogisticModel lr_eq = fit_logistic(equity, cfg.fit);
    mats[4] = conditional_lor(lr_eq);
    mats[5] = mc_lor(lr_eq, z_samples);

    const LogisticModel adjusted = intercept_adjust(lr, sim.data);
    mats[6] = mc_lor(adjusted, z_samples);

    RepStats out;
    for (std::size_t i = 0; i < mats.size(); ++i) {
        out.excl[i] = mad_from_one(mats[i].values, false);
        out.incl[i] = mad_from_one(mats[i].values, true);
    }
    return out;
}

std::vector<std::string> expand_scenarios(const std::vector<std::string>& requested) {
    const auto& all = scenario_names();
    if (requested.empty()) return all;
    for (const auto& s : requested)
        if (s == "all") return all;
    for (const auto& s : requested)
        if (std::find(all.begin(), all.end(), s) == all.end())
            throw ConfigError("unknown scenario '" + s + "'");
    return requested;
}

} // namespace

Table4Report run_simulation(const ExperimentConfig& cfg) {
    if (cfg.replications < 1) throw ConfigError("replications must be >= 1");
    if (cfg.mclor_nu < 1) throw ConfigError("mclor_nu must be >= 1");
    const std::vector<std::string> chosen = expand_scenarios(cfg.scenarios);
    const auto& all = scenario_names();

    const int reps = cfg.replications;
    std::vector<std::vector<RepStats>> results(chosen.size());
    for (auto& v : results) v.resize(static_cast<std::size_t>(reps));

    const std::size_t total = chosen.size() * static_cast<std::size_t>(reps);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex err_mutex;
    std::string err_msg;

    const auto work = [&] {
        while (true) {
            const std::size_t t = next.fetch_add(1);
            if (t >= total || failed.load()) return;
            const std::size_t si = t / static_cast<std::size_t>(reps);
            const int rep = static_cast<int>(t % static_cast<std::size_t>(reps));
            const auto canon = static_cast<int>(
                std::find(all.begin(), all.end(), chosen[si]) - all.begin());
            try {
                results[si][static_cast<std::size_t>(rep)] =
                    run_replication(cfg, chosen[si], canon, rep);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(err_mutex);
                failed.store(true);
                if (err_msg.empty())
                    err_msg = "scenario '" + chosen[si] + "', replication " +
                              std::to_string(rep) + " (stream seed " +
                              std::to_string(derive_seed(cfg.master_seed,
                                                         static_cast<std::uint64_t>(canon),
                                                         static_cast<std::uint64_t>(rep))) +
                              "): " + e.what();
            }
        }
    };

    const int n_workers = std::min<int>(worker_threads(), static_cast<int>(total));
    if (n_workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) throw std::runtime_error("simulation failed: " + err_msg);

    Table4Report report;
    report.replications = reps;
    report.n = cfg.sim.n;
    report.p = cfg.sim.p;
    report.m_per_cell = cfg.bootstrap.m_per_cell > 0 ? cfg.bootstrap.m_per_cell : 800;
    report.mclor_nu = cfg.mclor_nu;
    report.master_seed = cfg.master_seed;
    report.mad_diagonal = cfg.mad_diagonal;
    for (std::size_t si = 0; si < chosen.size(); ++si) {
        ScenarioStats stats;
        stats.name = chosen[si];
        for (const auto& rep : results[si]) {
            for (std::size_t i = 0; i < 7; ++i) {
                stats.mean_excl[i] += rep.excl[i];
                stats.mean_incl[i] += rep.incl[i];
            }
        }
        for (std::size_t i = 0; i < 7; ++i) {
            stats.mean_excl[i] /= reps;
            stats.mean_incl[i] /= reps;
        }
        report.scenarios.push_back(std::move(stats));
    }
    return report;
}

// ---------------------------------------------------------------------------
// dataset pipeline

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

std::vector<HistogramSeries> bin_probabilities(const std::string& model_name,
                                               const std::vector<double>& probs,
                                               const Dataset& test) {
    const int a = test.num_groups();
    std::vector<HistogramSeries> series;
    series.reserve(static_cast<std::size_t>(a) * 2);
    for (int g = 0; g < a; ++g) {
        for (int y = 0; y < 2; ++y) {
            HistogramSeries s;
            s.model = model_name;
            s.group = g;
            s.label = y;
            series.push_back(std::move(s));
        }
    }
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const auto bin = std::min<std::size_t>(
            19, static_cast<std::size_t>(std::max(0.0, probs[i] * 20.0)));
        const std::size_t s = static_cast<std::size_t>(test.group[i]) * 2 +
                              static_cast<std::size_t>(test.label[i]);
        ++series[s].counts[bin];
    }
    return series;
}

ModelEval evaluate(const std::string& model_name, const std::vector<double>& test_probs,
                   double threshold, const Dataset& test) {
    ModelEval eval;
    eval.model = model_name;
    eval.fitted = true;
    eval.threshold = threshold;
    std::vector<int> pred(test_probs.size());
    for (std::size_t i = 0; i < test_probs.size(); ++i)
        pred[i] = test_probs[i] >= threshold ? 1 : 0;
    eval.metrics = group_sens_spec(pred, test.label, test.group, test.num_groups());
    eval.gap = equal_odds_gap(eval.metrics);
    return eval;
}

RegimeResult run_regime(const std::string& regime, const Dataset& train, const Dataset& test,
                        const ExperimentConfig& cfg) {
    RegimeResult rr;
    rr.regime = regime;
    rr.train_eor_mad =
        empirical_or(train.label, train.group, train.num_groups(), cfg.mad_diagonal).mad_from_one;

    LogisticModel lr = fit_logistic(train, cfg.fit);
    lr.threshold = calibrate_threshold(to_std(predict_proba(lr, train)), train.label,
                                       cfg.target_spec);
    const std::vector<double> lr_test = to_std(predict_proba(lr, test));
    rr.logistic = evaluate("logistic", lr_test, lr.threshold, test);
    rr.logistic_model_text = serialize_logistic(lr);
    rr.histograms = bin_probabilities("logistic", lr_test, test);

    try {
        const NaiveBayesModel nb = fit_naive_bayes(train);
        std::vector<double> nb_train(static_cast<std::size_t>(train.n_rows()));
        for (Eigen::Index i = 0; i < train.n_rows(); ++i)
            nb_train[static_cast<std::size_t>(i)] =
                nb_posterior(nb, train.group[static_cast<std::size_t>(i)], train.z.row(i));
        const double tau = calibrate_threshold(nb_train, train.label, cfg.target_spec);
        std::vector<double> nb_test(static_cast<std::size_t>(test.n_rows()));
        for (Eigen::Index i = 0; i < test.n_rows(); ++i)
            nb_test[static_cast<std::size_t>(i)] =
                nb_posterior(nb, test.group[static_cast<std::size_t>(i)], test.z.row(i));
        rr.naive_bayes = evaluate("naive_bayes", nb_test, tau, test);
        auto nb_hist = bin_probabilities("naive_bayes", nb_test, test);
        rr.histograms.insert(rr.histograms.end(), nb_hist.begin(), nb_hist.end());
    } catch (const std::invalid_argument& e) {
        rr.naive_bayes.model = "naive_bayes";
        rr.naive_bayes.fitted = false;
        rr.naive_bayes.skip_reason = e.what();
    }
    return rr;
}

} // namespace

PipelineReport run_dataset_pipeline(const ExperimentConfig& cfg, const Dataset& data) {
    data.validate();
    if (data.num_groups() < 2)
        throw std::invalid_argument("pipeline: need at least two groups");

    const auto part = partition_by_group_label(data);
    const auto split = sequential_split(part, cfg.split_fractions);
    const int a = data.num_groups();

    std::vector<Eigen::Index> test_rows;
    Eigen::Index train_total = 0;
    Eigen::Index min_cell = data.n_rows();
    for (int g = 0; g < a; ++g) {
        for (int y = 0; y < 2; ++y) {
            const auto& tr = split.train_cell(g, y);
            train_total += static_cast<Eigen::Index>(tr.size());
            min_cell = std::min(min_cell, static_cast<Eigen::Index>(tr.size()));
            const auto& te = split.test_cell(g, y);
            test_rows.insert(test_rows.end(), te.begin(), te.end());
        }
    }
    const Dataset test = take_rows(data, test_rows);

    BootstrapSpec blind = cfg.bootstrap;
    blind.mode = BootstrapMode::blind;
    if (blind.n_pos <= 0 && blind.n_neg <= 0) blind.n_pos = blind.n_neg = train_total / 2;
    blind.seed = derive_seed(cfg.master_seed, 0);

    BootstrapSpec equity = cfg.bootstrap;
    equity.mode = BootstrapMode::equity;
    if (equity.m_per_cell <= 0) equity.m_per_cell = std::min(min_cell, cfg.m_max);
    equity.seed = derive_seed(cfg.master_seed, 1);

    PipelineReport report;
    report.group_names = data.group_names;
    report.blind = run_regime("blind", blind_bootstrap(split, data, blind), test, cfg);
    report.equity = run_regime("equity", equity_bootstrap(split, data, equity), test, cfg);
    return report;
}

// ---------------------------------------------------------------------------
// rendering

namespace {

std::string fmt4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

void append_shortest(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

std::filesystem::path ensure_dir(const std::string& dir) {
    std::filesystem::path p = dir.empty() ? "." : dir;
    std::error_code ec;
    std::filesystem::create_directories(p, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + p.string() + "'");
    return p;
}

const std::array<const char*, 7> kStatNames = {
    "eor", "lor", "mclor", "eor_equity", "lor_equity", "mclor_equity", "intadj"};

} // namespace

void write_table4(const Table4Report& report, const std::string& output_dir) {
    const auto dir = ensure_dir(output_dir);
    std::string csv = "scenario";
    for (const char* s : kStatNames) csv += std::string(",") + s;
    csv += '\n';
    for (const auto& sc : report.scenarios) {
        csv += sc.name;
        const auto& mean = report.mad_diagonal ? sc.mean_incl : sc.mean_excl;
        for (double v : mean) {
            csv += ',';
            append_shortest(csv, v);
        }
        csv += '\n';
    }
    write_file(dir / "table4.csv", csv);
}

void render_table4(const Table4Report& report, std::ostream& out) {
    std::string text = "simulation study: mean |odds ratio - 1| over " +
                       std::to_string(report.replications) + " replications\n";
    text += "n=" + std::to_string(report.n) + "  p=" + std::to_string(report.p) +
            "  M=" + std::to_string(report.m_per_cell) +
            " per cell  nu=" + std::to_string(report.mclor_nu) +
            "  master_seed=" + std::to_string(report.master_seed) + "\n";
    text += "original model fit on all n rows; equity model refit on the 2|A|M bootstrap\n";
    text += std::string("diagonal ") + (report.mad_diagonal ? "included in" : "excluded from") +
            " the mean\n\n";

    std::size_t name_w = std::string("scenario").size();
    for (const auto& sc : report.scenarios) name_w = std::max(name_w, sc.name.size());
    std::array<std::size_t, 7> col_w{};
    for (std::size_t c = 0; c < 7; ++c)
        col_w[c] = std::max<std::size_t>(std::strlen(kStatNames[c]), 6);

    const auto pad = [&text](const std::string& cell, std::size_t width) {
        text += "  ";
        if (cell.size() < width) text.append(width - cell.size(), ' ');
        text += cell;
    };
    text += "scenario";
    text.append(name_w - 8, ' ');
    for (std::size_t c = 0; c < 7; ++c) pad(kStatNames[c], col_w[c]);
    text += '\n';
    for (const auto& sc : report.scenarios) {
        text += sc.name;
        text.append(name_w - sc.name.size(), ' ');
        const auto& mean = report.mad_diagonal ? sc.mean_incl : sc.mean_excl;
        for (std::size_t c = 0; c < 7; ++c) pad(fmt4(mean[c]), col_w[c]);
        text += '\n';
    }
    out << text;
}

namespace {

void append_metrics_rows(std::string& csv, const ModelEval& eval,
                         const std::vector<std::string>& group_names) {
    if (!eval.fitted) return;
    for (int g = 0; g < eval.metrics.num_groups(); ++g) {
        csv += eval.model + ',' + group_names[static_cast<std::size_t>(g)];
        csv += ',' + fmt4(eval.metrics.sens[g]) + ',' + fmt4(eval.metrics.spec[g]);
        csv += ',' + std::to_string(eval.metrics.pos_count[g]) + ',' +
               std::to_string(eval.metrics.neg_count[g]) + '\n';
    }
    csv += eval.model + ",range," + fmt4(eval.metrics.sens_range) + ',' +
           fmt4(eval.metrics.spec_range) + ",,\n";
}

void write_regime(const RegimeResult& rr, const std::vector<std::string>& group_names,
                  const std::filesystem::path& dir) {
    std::string metrics = "model,group,sensitivity,specificity,positives,negatives\n";
    append_metrics_rows(metrics, rr.logistic, group_names);
    append_metrics_rows(metrics, rr.naive_bayes, group_names);
    write_file(dir / ("metrics_" + rr.regime + ".csv"), metrics);

    std::string hist = "model,group,label,bin,low,high,count\n";
    for (const auto& s : rr.histograms) {
        for (std::size_t b = 0; b < s.counts.size(); ++b) {
            hist += s.model + ',' + group_names[static_cast<std::size_t>(s.group)] + ',' +
                    std::to_string(s.label) + ',' + std::to_string(b) + ',';
            append_shortest(hist, static_cast<double>(b) / 20.0);
            hist += ',';
            append_shortest(hist, static_cast<double>(b + 1) / 20.0);
            hist += ',' + std::to_string(s.counts[b]) + '\n';
        }
    }
    write_file(dir / ("histograms_" + rr.regime + ".csv"), hist);

    write_file(dir / ("models_" + rr.regime + ".txt"), rr.logistic_model_text);
}

void render_regime(const RegimeResult& rr, const std::vector<std::string>& group_names,
                   std::ostream& out) {
    out << "== " << rr.regime << " bootstrap ==\n";
    out << "training-set empirical odds ratio mad: " << fmt4(rr.train_eor_mad) << "\n";
    for (const ModelEval* eval : {&rr.logistic, &rr.naive_bayes}) {
        out << "\n-- " << eval->model << " --\n";
        if (!eval->fitted) {
            out << "skipped: " << eval->skip_reason << "\n";
            continue;
        }
        out << "threshold " << fmt4(eval->threshold) << ", equal odds gap " << fmt4(eval->gap)
            << "\n";
        out << metrics_to_text(eval->metrics, group_names);
    }
    out << "\n";
}

} // namespace

void write_pipeline(const PipelineReport& report, const std::string& output_dir) {
    const auto dir = ensure_dir(output_dir);
    write_regime(report.blind, report.group_names, dir);
    write_regime(report.equity, report.group_names, dir);
}

void render_pipeline(const PipelineReport& report, std::ostream& out) {
    render_regime(report.blind, report.group_names, out);
    render_regime(report.equity, report.group_names, out);
}

} // namespace equiboot
