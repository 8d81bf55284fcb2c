#include "equiboot/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <unordered_map>

namespace equiboot {

void Dataset::validate() const {
    const Eigen::Index n = n_rows();
    if (z.rows() != n)
        throw std::invalid_argument("dataset: z has " + std::to_string(z.rows()) +
                                    " rows but " + std::to_string(n) + " group entries");
    if (static_cast<Eigen::Index>(label.size()) != n)
        throw std::invalid_argument("dataset: " + std::to_string(label.size()) +
                                    " labels for " + std::to_string(n) + " rows");
    if (static_cast<Eigen::Index>(feature_names.size()) != z.cols())
        throw std::invalid_argument("dataset: " + std::to_string(feature_names.size()) +
                                    " feature names for " + std::to_string(z.cols()) +
                                    " columns");
    const int a = num_groups();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (group[i] < 0 || group[i] >= a)
            throw std::invalid_argument("dataset: row " + std::to_string(i) +
                                        " group index " + std::to_string(group[i]) +
                                        " outside [0, " + std::to_string(a) + ")");
        if (label[i] != 0 && label[i] != 1)
            throw std::invalid_argument("dataset: row " + std::to_string(i) +
                                        " label " + std::to_string(label[i]) +
                                        " not in {0, 1}");
    }
}

GroupLabelPartition partition_by_group_label(const Dataset& data) {
    const int a = data.num_groups();
    std::vector<std::vector<Eigen::Index>> cells(static_cast<std::size_t>(a) * 2);
    for (Eigen::Index i = 0; i < data.n_rows(); ++i) {
        const std::size_t c = static_cast<std::size_t>(data.group[i]) * 2 +
                              static_cast<std::size_t>(data.label[i]);
        cells[c].push_back(i);
    }
    return GroupLabelPartition(a, std::move(cells));
}

TrainTestValSplit sequential_split(const GroupLabelPartition& part,
                                   const std::array<double, 3>& fractions) {
    for (double f : fractions)
        if (!(f >= 0.0))
            throw std::invalid_argument("split fractions must be nonnegative");
    const double total = fractions[0] + fractions[1] + fractions[2];
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("split fractions sum to " + std::to_string(total) +
                                    ", expected 1");

    TrainTestValSplit split;
    split.num_groups = part.num_groups();
    split.fractions = fractions;
    const std::size_t n_cells = static_cast<std::size_t>(part.num_groups()) * 2;
    split.train.resize(n_cells);
    split.test.resize(n_cells);
    split.val.resize(n_cells);
    for (int a = 0; a < part.num_groups(); ++a) {
        for (int y = 0; y < 2; ++y) {
            const auto& rows = part.cell(a, y);
            const auto m = static_cast<double>(rows.size());
            const auto n_train = static_cast<Eigen::Index>(std::floor(fractions[0] * m));
            const auto n_test = static_cast<Eigen::Index>(std::floor(fractions[1] * m));
            const std::size_t c = static_cast<std::size_t>(a) * 2 + static_cast<std::size_t>(y);
            auto it = rows.begin();
            split.train[c].assign(it, it + n_train);
            split.test[c].assign(it + n_train, it + n_train + n_test);
            split.val[c].assign(it + n_train + n_test, rows.end());
        }
    }
    return split;
}

Dataset take_rows(const Dataset& data, const std::vector<Eigen::Index>& rows) {
    Dataset out;
    out.feature_names = data.feature_names;
    out.group_names = data.group_names;
    const auto n = static_cast<Eigen::Index>(rows.size());
    out.z.resize(n, data.z.cols());
    out.group.resize(rows.size());
    out.label.resize(rows.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index r = rows[static_cast<std::size_t>(i)];
        out.z.row(i) = data.z.row(r);
        out.group[static_cast<std::size_t>(i)] = data.group[static_cast<std::size_t>(r)];
        out.label[static_cast<std::size_t>(i)] = data.label[static_cast<std::size_t>(r)];
    }
    return out;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    for (auto& f : fields) {
        while (!f.empty() && (f.back() == '\r' || f.back() == ' ' || f.back() == '\t'))
            f.pop_back();
        std::size_t lead = 0;
        while (lead < f.size() && (f[lead] == ' ' || f[lead] == '\t')) ++lead;
        f.erase(0, lead);
    }
    return fields;
}

double parse_double(const std::string& s, std::size_t row, const std::string& column) {
    double v = 0.0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw std::runtime_error("csv: row " + std::to_string(row) + ", column '" + column +
                                 "': cannot parse '" + s + "' as a number");
    return v;
}

// Shortest decimal form that round-trips to the same double.
void append_double(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

} // namespace

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("csv: cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("csv: '" + path + "' is empty");
    const auto header = split_fields(line);

    std::ptrdiff_t group_col = -1, label_col = -1;
    std::vector<std::size_t> feature_cols;
    Dataset out;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == schema.group_column) {
            if (group_col >= 0)
                throw std::runtime_error("csv: duplicate group column '" + header[j] + "'");
            group_col = static_cast<std::ptrdiff_t>(j);
        } else if (header[j] == schema.label_column) {
            if (label_col >= 0)
                throw std::runtime_error("csv: duplicate label column '" + header[j] + "'");
            label_col = static_cast<std::ptrdiff_t>(j);
        } else {
            feature_cols.push_back(j);
            out.feature_names.push_back(header[j]);
        }
    }
    if (group_col < 0)
        throw std::runtime_error("csv: missing group column '" + schema.group_column + "'");
    if (label_col < 0)
        throw std::runtime_error("csv: missing label column '" + schema.label_column + "'");

    std::unordered_map<std::string, int> group_index;
    std::vector<double> values; // row-major n x p buffer
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        ++row;
        const auto fields = split_fields(line);
        if (fields.size() != header.size())
            throw std::runtime_error("csv: row " + std::to_string(row) + " has " +
                                     std::to_string(fields.size()) + " fields, expected " +
                                     std::to_string(header.size()));

        const std::string& g = fields[static_cast<std::size_t>(group_col)];
        auto [it, inserted] = group_index.try_emplace(g, static_cast<int>(out.group_names.size()));
        if (inserted) out.group_names.push_back(g);
        out.group.push_back(it->second);

        const std::string& y = fields[static_cast<std::size_t>(label_col)];
        if (y == "0" || y == "1")
            out.label.push_back(y[0] - '0');
        else
            throw std::runtime_error("csv: row " + std::to_string(row) + ": label '" + y +
                                     "' not in {0, 1}");

        for (std::size_t j : feature_cols)
            values.push_back(parse_double(fields[j], row, header[j]));
    }

    const auto n = static_cast<Eigen::Index>(row);
    const auto p = static_cast<Eigen::Index>(feature_cols.size());
    out.z.resize(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j)
            out.z(i, j) = values[static_cast<std::size_t>(i * p + j)];
    out.validate();
    return out;
}

void write_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("csv: cannot write '" + path + "'");

    std::string buf = "group";
    for (const auto& name : data.feature_names) {
        buf += ',';
        buf += name;
    }
    buf += ",label\n";
    out << buf;

    for (Eigen::Index i = 0; i < data.n_rows(); ++i) {
        buf.clear();
        buf += data.group_names[static_cast<std::size_t>(data.group[static_cast<std::size_t>(i)])];
        for (Eigen::Index j = 0; j < data.n_features(); ++j) {
            buf += ',';
            append_double(buf, data.z(i, j));
        }
        buf += ',';
        buf += static_cast<char>('0' + data.label[static_cast<std::size_t>(i)]);
        buf += '\n';
        out << buf;
    }
    if (!out) throw std::runtime_error("csv: write to '" + path + "' failed");
}

} // namespace equiboot
