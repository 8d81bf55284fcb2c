#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "doctest.h"
#include "equiboot/dataset.hpp"
#include "test_util.hpp"

using namespace equiboot;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("dataset_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("dataset validate catches structural violations") {
    Dataset d = testutil::tagged_dataset({{0, 1}, {1, 0}}, 2);
    CHECK_NOTHROW(d.validate());

    Dataset bad_label = d;
    bad_label.label[1] = 2;
    CHECK_THROWS_AS(bad_label.validate(), std::invalid_argument);

    Dataset bad_group = d;
    bad_group.group[0] = 5;
    CHECK_THROWS_AS(bad_group.validate(), std::invalid_argument);

    Dataset bad_rows = d;
    bad_rows.label.push_back(1);
    CHECK_THROWS_AS(bad_rows.validate(), std::invalid_argument);

    Dataset bad_names = d;
    bad_names.feature_names.push_back("extra");
    CHECK_THROWS_AS(bad_names.validate(), std::invalid_argument);
}

TEST_CASE("partition groups rows by (group, label) in order") {
    // cells: (0,0) x2, (0,1) x3, (1,0) x3, (1,1) x2
    const Dataset d = testutil::tagged_dataset(
        {{0, 1}, {1, 0}, {0, 0}, {0, 1}, {1, 1}, {1, 0}, {0, 1}, {1, 0}, {0, 0}, {1, 1}}, 2);
    const auto part = partition_by_group_label(d);

    CHECK(part.num_groups() == 2);
    CHECK(part.count(0, 0) == 2);
    CHECK(part.count(0, 1) == 3);
    CHECK(part.count(1, 0) == 3);
    CHECK(part.count(1, 1) == 2);
    CHECK(part.cell(0, 1) == std::vector<Eigen::Index>{0, 3, 6});
    CHECK(part.cell(1, 0) == std::vector<Eigen::Index>{1, 5, 7});
}

TEST_CASE("partition records empty cells") {
    const Dataset d = testutil::tagged_dataset({{0, 1}, {0, 1}}, 2);
    const auto part = partition_by_group_label(d);
    CHECK(part.count(0, 0) == 0);
    CHECK(part.count(1, 0) == 0);
    CHECK(part.count(1, 1) == 0);
}

TEST_CASE("sequential split takes floors in order") {
    std::vector<std::pair<int, int>> rows(10, {0, 1});
    const Dataset d10 = testutil::tagged_dataset(rows, 1);
    const auto split10 = sequential_split(partition_by_group_label(d10), {0.6, 0.2, 0.2});
    CHECK(split10.train_cell(0, 1).size() == 6);
    CHECK(split10.test_cell(0, 1).size() == 2);
    CHECK(split10.val_cell(0, 1).size() == 2);
    CHECK(split10.train_cell(0, 1) == std::vector<Eigen::Index>{0, 1, 2, 3, 4, 5});
    CHECK(split10.test_cell(0, 1) == std::vector<Eigen::Index>{6, 7});
    CHECK(split10.val_cell(0, 1) == std::vector<Eigen::Index>{8, 9});

    rows.assign(7, {0, 0});
    const Dataset d7 = testutil::tagged_dataset(rows, 1);
    const auto split7 = sequential_split(partition_by_group_label(d7), {0.6, 0.2, 0.2});
    CHECK(split7.train_cell(0, 0).size() == 4);
    CHECK(split7.test_cell(0, 0).size() == 1);
    CHECK(split7.val_cell(0, 0).size() == 2);
}

TEST_CASE("sequential split validates fractions") {
    const Dataset d = testutil::tagged_dataset({{0, 1}, {0, 0}}, 1);
    const auto part = partition_by_group_label(d);
    CHECK_THROWS_AS(sequential_split(part, {0.5, 0.2, 0.2}), std::invalid_argument);
    CHECK_THROWS_AS(sequential_split(part, {1.2, -0.2, 0.0}), std::invalid_argument);
    CHECK_NOTHROW(sequential_split(part, {1.0, 0.0, 0.0}));
}

TEST_CASE("take_rows copies the requested rows") {
    const Dataset d = testutil::tagged_dataset({{0, 1}, {1, 0}, {1, 1}, {0, 0}}, 2, 2);
    const Dataset sub = take_rows(d, {2, 0});
    CHECK(sub.n_rows() == 2);
    CHECK(sub.z(0, 0) == 2.0);
    CHECK(sub.z(1, 0) == 0.0);
    CHECK(sub.group == std::vector<int>{1, 0});
    CHECK(sub.label == std::vector<int>{1, 1});
    CHECK(sub.group_names == d.group_names);
    CHECK(sub.feature_names == d.feature_names);
}

TEST_CASE("csv round trip is bit exact") {
    Dataset d;
    d.z.resize(4, 3);
    d.z << 0.1, 1.0 / 3.0, -7.25, 1e-300, 123456.789, 0.0, 3.141592653589793, -0.0, 42.0, 1e17,
        -2.5e-9, 8.0;
    d.group = {1, 0, 1, 2};
    d.label = {0, 1, 1, 0};
    d.group_names = {"alpha", "beta", "gamma"};
    d.feature_names = {"f1", "f2", "f3"};

    TempFile tmp("roundtrip.csv");
    write_csv(d, tmp.path);
    const Dataset back = load_csv(tmp.path);

    REQUIRE(back.n_rows() == 4);
    REQUIRE(back.n_features() == 3);
    CHECK(back.z == d.z);
    CHECK(back.label == d.label);
    // levels reindexed by first appearance: beta(0) -> 0, alpha(1) -> 1, gamma -> 2
    CHECK(back.group_names == std::vector<std::string>{"beta", "alpha", "gamma"});
    CHECK(back.group == std::vector<int>{0, 1, 0, 2});
    CHECK(back.feature_names == d.feature_names);
}

TEST_CASE("csv header controls column roles") {
    TempFile tmp("roles.csv");
    {
        std::ofstream out(tmp.path);
        out << "x,label,race,y\n"
            << "1.5,0,a,2.5\n"
            << "2.5,1,b,3.5\n";
    }
    CsvSchema schema;
    schema.group_column = "race";
    const Dataset d = load_csv(tmp.path, schema);
    CHECK(d.feature_names == std::vector<std::string>{"x", "y"});
    CHECK(d.group_names == std::vector<std::string>{"a", "b"});
    CHECK(d.z(1, 1) == 3.5);
    CHECK(d.label == std::vector<int>{0, 1});
}

TEST_CASE("csv load reports precise errors") {
    TempFile tmp("errors.csv");
    {
        std::ofstream out(tmp.path);
        out << "group,z1,label\n"
            << "a,1.0,0\n"
            << "b,oops,1\n";
    }
    CHECK_THROWS_WITH_AS(load_csv(tmp.path), doctest::Contains("row 2"), std::runtime_error);

    {
        std::ofstream out(tmp.path);
        out << "group,z1,label\n"
            << "a,1.0,7\n";
    }
    CHECK_THROWS_WITH_AS(load_csv(tmp.path), doctest::Contains("label"), std::runtime_error);

    {
        std::ofstream out(tmp.path);
        out << "group,z1,label\n"
            << "a,1.0\n";
    }
    CHECK_THROWS_WITH_AS(load_csv(tmp.path), doctest::Contains("fields"), std::runtime_error);

    {
        std::ofstream out(tmp.path);
        out << "g,z1,label\na,1,0\n";
    }
    CHECK_THROWS_WITH_AS(load_csv(tmp.path), doctest::Contains("group"), std::runtime_error);

    CHECK_THROWS_AS(load_csv("no_such_file_anywhere.csv"), std::runtime_error);
}

TEST_CASE("csv write emits group,<features>,label header") {
    const Dataset d = testutil::tagged_dataset({{0, 1}, {1, 0}}, 2, 2);
    TempFile tmp("header.csv");
    write_csv(d, tmp.path);
    const std::string text = slurp(tmp.path);
    CHECK(text.rfind("group,z1,z2,label\n", 0) == 0);
    CHECK(text.find("g1,0,0,1\n") != std::string::npos);
    CHECK(text.find("g2,1,0,0\n") != std::string::npos);
}
