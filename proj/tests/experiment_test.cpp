#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "equiboot/experiment.hpp"
#include "test_util.hpp"

using namespace equiboot;

namespace {

namespace fs = std::filesystem;

fs::path work_dir(const std::string& name) {
    const fs::path dir = fs::path("exp_test_out") / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const std::string& content) {
    const fs::path path = dir / "test.cfg";
    std::ofstream out(path);
    out << content;
    REQUIRE(out.good());
    return path;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text) n += c == '\n' ? 1 : 0;
    return n;
}

ExperimentConfig small_sim_config() {
    ExperimentConfig cfg;
    cfg.scenarios = {"discrete_a3"};
    cfg.replications = 2;
    cfg.master_seed = 5;
    cfg.sim.n = 2000;
    cfg.sim.p = 3;
    cfg.bootstrap.m_per_cell = 100;
    cfg.mclor_nu = 2000;
    return cfg;
}

} // namespace

TEST_CASE("scenario catalogue") {
    const auto& names = scenario_names();
    REQUIRE(names.size() == 10);

    ExperimentConfig cfg;
    cfg.sim.n = 77;
    cfg.sim.p = 4;

    const SimConfig d10 = resolve_scenario("discrete_a10", cfg);
    CHECK(d10.num_groups == 10);
    CHECK(d10.z_mode == ZMode::discrete);
    CHECK(d10.n == 77); // scenario keeps the shared size settings
    CHECK(d10.p == 4);

    const SimConfig rc3 = resolve_scenario("cont_rand_corr_a3", cfg);
    CHECK(rc3.num_groups == 3);
    CHECK(rc3.z_mode == ZMode::continuous);
    CHECK(rc3.mean_mode == MeanMode::random);
    CHECK(rc3.cov_mode == CovMode::random);

    const SimConfig zu10 = resolve_scenario("cont_zero_uncorr_a10", cfg);
    CHECK(zu10.mean_mode == MeanMode::zero);
    CHECK(zu10.cov_mode == CovMode::identity);

    for (const auto& name : names) CHECK_NOTHROW(resolve_scenario(name, cfg));
    CHECK_THROWS_AS(resolve_scenario("foo_a3", cfg), ConfigError);
    CHECK_THROWS_AS(resolve_scenario("discrete", cfg), ConfigError);
}

TEST_CASE("config file round trip") {
    const auto dir = work_dir("config_ok");
    const auto path = write_config(dir,
                                   "# experiment settings\n"
                                   "mode = simulate\n"
                                   "scenarios = discrete_a3, cont_rand_corr_a10\n"
                                   "replications = 7\n"
                                   "master_seed = 42\n"
                                   "output_dir = out_dir_x\n"
                                   "; sizes\n"
                                   "[sim]\n"
                                   "n = 1234\n"
                                   "p = 5\n"
                                   "num_groups = 3\n"
                                   "z_mode = continuous\n"
                                   "mean_mode = random\n"
                                   "cov_mode = random\n"
                                   "seed = 99\n"
                                   "[bootstrap]\n"
                                   "mode = equity\n"
                                   "m_per_cell = 321\n"
                                   "n_pos = 10\n"
                                   "n_neg = 20\n"
                                   "replacement = always\n"
                                   "m_max = 5000\n"
                                   "[fit]\n"
                                   "tol_grad = 0.5\n"
                                   "max_iter = 77\n"
                                   "ridge = 0.001\n"
                                   "verbose = true\n"
                                   "[metrics]\n"
                                   "target_spec = 0.9\n"
                                   "mclor_nu = 444\n"
                                   "mad_diagonal = false\n"
                                   "[data]\n"
                                   "group_column = race\n"
                                   "label_column = outcome\n"
                                   "[split]\n"
                                   "train = 0.5\n"
                                   "test = 0.25\n"
                                   "val = 0.25\n");

    const ExperimentConfig cfg = parse_config_file(path.string());
    CHECK(cfg.mode == RunMode::simulate);
    CHECK(cfg.scenarios == std::vector<std::string>{"discrete_a3", "cont_rand_corr_a10"});
    CHECK(cfg.replications == 7);
    CHECK(cfg.master_seed == 42);
    CHECK(cfg.output_dir == "out_dir_x");
    CHECK(cfg.sim.n == 1234);
    CHECK(cfg.sim.p == 5);
    CHECK(cfg.sim.num_groups == 3);
    CHECK(cfg.sim.z_mode == ZMode::continuous);
    CHECK(cfg.sim.mean_mode == MeanMode::random);
    CHECK(cfg.sim.cov_mode == CovMode::random);
    CHECK(cfg.sim.seed == 99);
    CHECK(cfg.bootstrap.mode == BootstrapMode::equity);
    CHECK(cfg.bootstrap.m_per_cell == 321);
    CHECK(cfg.bootstrap.n_pos == 10);
    CHECK(cfg.bootstrap.n_neg == 20);
    CHECK(cfg.bootstrap.replacement == ReplacementPolicy::always);
    CHECK(cfg.m_max == 5000);
    CHECK(cfg.fit.tol_grad == 0.5);
    CHECK(cfg.fit.max_iter == 77);
    CHECK(cfg.fit.ridge == 0.001);
    CHECK(cfg.fit.verbose);
    CHECK(cfg.target_spec == 0.9);
    CHECK(cfg.mclor_nu == 444);
    CHECK(!cfg.mad_diagonal);
    CHECK(cfg.schema.group_column == "race");
    CHECK(cfg.schema.label_column == "outcome");
    CHECK(cfg.split_fractions[0] == 0.5);
    CHECK(cfg.split_fractions[1] == 0.25);
    CHECK(cfg.split_fractions[2] == 0.25);
}

TEST_CASE("config file rejects bad input with the offending line") {
    const auto dir = work_dir("config_bad");
    const auto bad = [&](const std::string& content) {
        return write_config(dir, content).string();
    };

    CHECK_THROWS_WITH_AS(parse_config_file(bad("mode = nope\n")), doctest::Contains(":1:"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_file(bad("# c\n[weird]\n")), doctest::Contains(":2:"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_file(bad("foo = 1\n")),
                         doctest::Contains("unknown key 'foo'"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_file(bad("replications = x\n")),
                         doctest::Contains("integer"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_file(bad("scenarios = discrete_a3, nope\n")),
                         doctest::Contains("unknown scenario 'nope'"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_file(bad("just a line\n")),
                         doctest::Contains("key = value"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_file(bad("[split]\ntrain=0.5\ntest=0.5\nval=0.5\n")),
                         doctest::Contains("sum to 1"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_file(bad("[metrics]\ntarget_spec = -0.5\n")),
                         doctest::Contains("target_spec"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_file(bad("replications = 0\n")),
                         doctest::Contains("replications"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_file("no_such_file.cfg"), doctest::Contains("cannot open"),
                         ConfigError);
}

TEST_CASE("worker thread override") {
    const char* old = std::getenv("EQUIBOOT_THREADS");
    const std::string saved = old ? old : "";

    ::unsetenv("EQUIBOOT_THREADS");
    CHECK(worker_threads() == 1);
    ::setenv("EQUIBOOT_THREADS", "3", 1);
    CHECK(worker_threads() == 3);
    ::setenv("EQUIBOOT_THREADS", "", 1);
    CHECK(worker_threads() == 1);
    ::setenv("EQUIBOOT_THREADS", "0", 1);
    CHECK_THROWS_AS(worker_threads(), ConfigError);
    ::setenv("EQUIBOOT_THREADS", "abc", 1);
    CHECK_THROWS_AS(worker_threads(), ConfigError);

    if (old)
        ::setenv("EQUIBOOT_THREADS", saved.c_str(), 1);
    else
        ::unsetenv("EQUIBOOT_THREADS");
}

TEST_CASE("simulation study is deterministic and seed streams are positional") {
    const ExperimentConfig cfg = small_sim_config();

    const Table4Report a = run_simulation(cfg);
    const Table4Report b = run_simulation(cfg);
    REQUIRE(a.scenarios.size() == 1);
    CHECK(a.scenarios[0].name == "discrete_a3");
    for (std::size_t i = 0; i < 7; ++i) {
        CHECK(a.scenarios[0].mean_excl[i] == b.scenarios[0].mean_excl[i]);
        CHECK(a.scenarios[0].mean_incl[i] == b.scenarios[0].mean_incl[i]);
        CHECK(std::isfinite(a.scenarios[0].mean_excl[i]));
        CHECK(a.scenarios[0].mean_excl[i] >= 0.0);
    }

    // the equity-resampled counting estimate is exactly balanced
    CHECK(a.scenarios[0].mean_excl[3] == 0.0);
    CHECK(a.scenarios[0].mean_incl[3] == 0.0);

    // a scenario's replication streams do not depend on which scenarios run
    ExperimentConfig two = cfg;
    two.scenarios = {"cont_zero_uncorr_a3", "discrete_a3"};
    const Table4Report both = run_simulation(two);
    REQUIRE(both.scenarios.size() == 2);
    CHECK(both.scenarios[1].name == "discrete_a3");
    for (std::size_t i = 0; i < 7; ++i) {
        CHECK(both.scenarios[1].mean_excl[i] == a.scenarios[0].mean_excl[i]);
        CHECK(both.scenarios[1].mean_incl[i] == a.scenarios[0].mean_incl[i]);
    }
}

TEST_CASE("replication failures name the scenario and stream") {
    ExperimentConfig cfg = small_sim_config();
    cfg.sim.n = 4; // guarantees an empty (group, label) training cell
    cfg.sim.p = 2;
    cfg.replications = 1;
    try {
        run_simulation(cfg);
        FAIL("expected a failure");
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("scenario 'discrete_a3'") != std::string::npos);
        CHECK(msg.find("replication 0") != std::string::npos);
        CHECK(msg.find("stream seed") != std::string::npos);
    }
}

TEST_CASE("simulation study report files") {
    ExperimentConfig cfg = small_sim_config();
    cfg.replications = 1;
    const Table4Report report = run_simulation(cfg);
    const auto dir = work_dir("table4");
    write_table4(report, dir.string());

    const std::string csv = read_file(dir / "table4.csv");
    CHECK(count_lines(csv) == 2);
    CHECK(csv.rfind("scenario,eor,lor,mclor,eor_equity,lor_equity,mclor_equity,intadj\n", 0) == 0);
    CHECK(csv.find("\ndiscrete_a3,") != std::string::npos);

    std::ostringstream text;
    render_table4(report, text);
    CHECK(text.str().rfind("simulation study:", 0) == 0);
    CHECK(text.str().find("discrete_a3") != std::string::npos);
    CHECK(text.str().find("master_seed=5") != std::string::npos);
    CHECK(text.str().find("eor_equity") != std::string::npos);
}

TEST_CASE("dataset pipeline on balanced-friendly synthetic data") {
    SimConfig sc;
    sc.n = 4000;
    sc.p = 4;
    sc.num_groups = 3;
    sc.z_mode = ZMode::discrete;
    sc.seed = 11;
    const SimData sim = simulate_dataset(sc);

    ExperimentConfig cfg;
    cfg.mode = RunMode::dataset;
    cfg.master_seed = 7;
    const PipelineReport report = run_dataset_pipeline(cfg, sim.data);

    CHECK(report.group_names == sim.data.group_names);
    CHECK(report.equity.train_eor_mad == 0.0);
    CHECK(report.blind.train_eor_mad >= 0.0);

    for (const RegimeResult* rr : {&report.blind, &report.equity}) {
        CHECK(rr->logistic.fitted);
        CHECK(rr->naive_bayes.fitted);
        CHECK(rr->histograms.size() == 12); // 2 models x 3 groups x 2 labels

        std::int64_t hist_total = 0;
        for (const auto& s : rr->histograms)
            if (s.model == "logistic")
                for (std::int64_t c : s.counts) hist_total += c;
        const std::int64_t test_rows = rr->logistic.metrics.pos_count.sum() +
                                       rr->logistic.metrics.neg_count.sum();
        CHECK(hist_total == test_rows);
        CHECK(test_rows > 700); // 20% test split of 4000

        const LogisticModel parsed = parse_logistic(rr->logistic_model_text);
        CHECK(parsed.beta_a.size() == 3);
        CHECK(parsed.beta_z.size() == 4);
        CHECK(parsed.threshold > 0.0);
        CHECK(parsed.group_names == sim.data.group_names);
    }

    const auto dir = work_dir("pipeline");
    write_pipeline(report, dir.string());
    for (const char* regime : {"blind", "equity"}) {
        CHECK(fs::exists(dir / ("metrics_" + std::string(regime) + ".csv")));
        CHECK(fs::exists(dir / ("models_" + std::string(regime) + ".txt")));
        const std::string hist = read_file(dir / ("histograms_" + std::string(regime) + ".csv"));
        CHECK(count_lines(hist) == 12 * 20 + 1);
        CHECK(hist.rfind("model,group,label,bin,low,high,count\n", 0) == 0);
    }
    const std::string metrics = read_file(dir / "metrics_equity.csv");
    CHECK(metrics.rfind("model,group,sensitivity,specificity,positives,negatives\n", 0) == 0);
    CHECK(metrics.find("naive_bayes,range,") != std::string::npos);

    std::ostringstream text;
    render_pipeline(report, text);
    CHECK(text.str().find("== blind bootstrap ==") != std::string::npos);
    CHECK(text.str().find("== equity bootstrap ==") != std::string::npos);
    CHECK(text.str().find("equal odds gap") != std::string::npos);
}

TEST_CASE("dataset pipeline skips naive bayes on non-binary features") {
    SimConfig sc;
    sc.n = 1500;
    sc.p = 2;
    sc.num_groups = 3;
    sc.z_mode = ZMode::continuous;
    sc.seed = 13;
    const SimData sim = simulate_dataset(sc);

    ExperimentConfig cfg;
    const PipelineReport report = run_dataset_pipeline(cfg, sim.data);
    CHECK(report.blind.logistic.fitted);
    CHECK(!report.blind.naive_bayes.fitted);
    CHECK(report.blind.naive_bayes.skip_reason.find("binary") != std::string::npos);
    CHECK(report.blind.histograms.size() == 6);

    std::ostringstream text;
    render_pipeline(report, text);
    CHECK(text.str().find("skipped:") != std::string::npos);
}

TEST_CASE("equity training closes the equal odds gap on imbalanced data") {
    SimConfig sc;
    sc.n = 12000;
    sc.p = 5;
    sc.num_groups = 3;
    sc.z_mode = ZMode::discrete;
    sc.seed = 21;
    const SimData sim = simulate_dataset(sc);

    ExperimentConfig cfg;
    const PipelineReport report = run_dataset_pipeline(cfg, sim.data);
    CHECK(report.equity.logistic.gap < report.blind.logistic.gap);
}

TEST_CASE("dataset pipeline validates its input") {
    ExperimentConfig cfg;
    const Dataset single = testutil::tagged_dataset({{0, 0}, {0, 1}}, 1);
    CHECK_THROWS_WITH_AS(run_dataset_pipeline(cfg, single), doctest::Contains("two groups"),
                         std::invalid_argument);
}
