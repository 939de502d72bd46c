#include "mbp/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "mbp/errors.hpp"
#include "mbp/rng.hpp"

namespace mbp {

namespace {

double parse_cell(const std::string& cell, std::size_t line, std::size_t column) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end != begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || begin == end) {
        throw ParseError("malformed numeric cell at line " + std::to_string(line) +
                         ", column " + std::to_string(column) + ": '" + cell + "'");
    }
    return value;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double map_class_target(double y, std::size_t line) {
    if (y == 0.0) return -1.0;
    if (y == 1.0) return 1.0;
    if (y == -1.0) return -1.0;
    throw DomainError("classification target at line " + std::to_string(line) +
                      " must be one of {0, 1, -1, +1}, got " + std::to_string(y));
}

}  // namespace

Dataset load_csv(const std::string& path, Task task) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open CSV file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty CSV file: " + path);

    Dataset data;
    data.task = task;
    std::size_t cols = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_line(line);
        if (cols == 0) {
            if (cells.size() < 2) {
                throw ParseError("line " + std::to_string(line_no) +
                                 ": need at least one feature column plus the target");
            }
            cols = cells.size();
            data.features.cols = cols - 1;
        } else if (cells.size() != cols) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(cols) + " columns, got " +
                             std::to_string(cells.size()));
        }
        for (std::size_t c = 0; c + 1 < cols; ++c) {
            data.features.values.push_back(parse_cell(cells[c], line_no, c + 1));
        }
        double y = parse_cell(cells[cols - 1], line_no, cols);
        if (task == Task::classification) y = map_class_target(y, line_no);
        data.targets.push_back(y);
        ++data.features.rows;
    }
    if (data.features.rows == 0) throw ParseError("CSV has a header but no data rows: " + path);
    return data;
}

void save_csv(const std::string& path, const Dataset& data) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write CSV file: " + path);
    for (std::size_t c = 0; c < data.dim(); ++c) out << "x" << (c + 1) << ",";
    out << "y\n";
    char buf[32];
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto row = data.features.row(i);
        for (double v : row) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << buf << ",";
        }
        if (data.task == Task::classification) {
            out << (data.targets[i] > 0.0 ? 1 : 0) << "\n";
        } else {
            std::snprintf(buf, sizeof(buf), "%.17g", data.targets[i]);
            out << buf << "\n";
        }
    }
    if (!out) throw IoError("short write: " + path);
}

std::vector<double> simulated1_hyperplane(std::size_t d, std::uint64_t seed) {
    NormalSampler normal(derive_seed(seed, 0, 0));
    std::vector<double> w(d);
    for (auto& v : w) v = normal.next();
    return w;
}

Dataset gen_simulated1(std::size_t n, std::size_t d, std::uint64_t seed) {
    if (n == 0 || d == 0) throw DomainError("gen_simulated1 requires n >= 1 and d >= 1");
    const std::vector<double> w_true = simulated1_hyperplane(d, seed);
    NormalSampler normal(derive_seed(seed, 1, 0));
    Dataset data;
    data.task = Task::regression;
    data.features.rows = n;
    data.features.cols = d;
    data.features.values.resize(n * d);
    data.targets.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = data.features.row(i);
        double y = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
            row[c] = normal.next();
            y += w_true[c] * row[c];
        }
        data.targets[i] = y;
    }
    return data;
}

Dataset gen_simulated2(std::size_t n, std::size_t d, std::uint64_t seed) {
    if (n == 0 || d == 0) throw DomainError("gen_simulated2 requires n >= 1 and d >= 1");
    const std::vector<double> w_true = simulated1_hyperplane(d, seed);
    NormalSampler normal(derive_seed(seed, 1, 0));
    SplitMix64 label_rng(derive_seed(seed, 2, 0));
    Dataset data;
    data.task = Task::classification;
    data.features.rows = n;
    data.features.cols = d;
    data.features.values.resize(n * d);
    data.targets.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = data.features.row(i);
        double margin = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
            row[c] = normal.next();
            margin += w_true[c] * row[c];
        }
        const double base = margin > 0.0 ? 1.0 : -1.0;
        const bool flip = label_rng.uniform01() < 0.05;
        data.targets[i] = flip ? -base : base;
    }
    return data;
}

SplitDataset split(const Dataset& data, double train_fraction, std::uint64_t seed) {
    const std::size_t n = data.size();
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw DomainError("train_fraction must lie strictly between 0 and 1");
    }
    if (n < 2) throw DomainError("split requires at least 2 rows");
    const auto n_train =
        static_cast<std::size_t>(std::llround(static_cast<double>(n) * train_fraction));
    if (n_train == 0 || n_train == n) {
        throw DomainError("split would leave an empty part: train size " +
                          std::to_string(n_train) + " of " + std::to_string(n));
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    SplitMix64 rng(derive_seed(seed, 3, 0));
    for (std::size_t i = n - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i + 1));
        std::swap(order[i], order[j]);
    }

    const std::size_t d = data.dim();
    auto take = [&](std::size_t begin, std::size_t count) {
        Dataset part;
        part.task = data.task;
        part.features.rows = count;
        part.features.cols = d;
        part.features.values.reserve(count * d);
        part.targets.reserve(count);
        for (std::size_t k = begin; k < begin + count; ++k) {
            const auto row = data.features.row(order[k]);
            part.features.values.insert(part.features.values.end(), row.begin(), row.end());
            part.targets.push_back(data.targets[order[k]]);
        }
        return part;
    };
    return {take(0, n_train), take(n_train, n - n_train)};
}

void standardize(SplitDataset& data) {
    const std::size_t d = data.train.dim();
    const std::size_t n = data.train.size();
    if (data.test.dim() != d) throw DomainError("train and test dimensions differ");
    std::vector<double> mean(d, 0.0), scale(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = data.train.features.row(i);
        for (std::size_t c = 0; c < d; ++c) mean[c] += row[c];
    }
    for (auto& m : mean) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = data.train.features.row(i);
        for (std::size_t c = 0; c < d; ++c) {
            const double diff = row[c] - mean[c];
            scale[c] += diff * diff;
        }
    }
    for (auto& s : scale) {
        s = std::sqrt(s / static_cast<double>(n));
        if (s == 0.0) s = 1.0;
    }
    for (Dataset* part : {&data.train, &data.test}) {
        for (std::size_t i = 0; i < part->size(); ++i) {
            auto row = part->features.row(i);
            for (std::size_t c = 0; c < d; ++c) row[c] = (row[c] - mean[c]) / scale[c];
        }
    }
}

}  // namespace mbp
