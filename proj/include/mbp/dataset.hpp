#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mbp {

/// Dense row-major matrix, just enough for feature storage.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    std::span<const double> row(std::size_t i) const {
        return {values.data() + i * cols, cols};
    }
    std::span<double> row(std::size_t i) {
        return {values.data() + i * cols, cols};
    }
};

enum class Task { regression, classification };

/// Labeled examples. Classification targets are always stored as -1/+1.
struct Dataset {
    Matrix features;
    std::vector<double> targets;
    Task task = Task::regression;

    std::size_t size() const { return features.rows; }
    std::size_t dim() const { return features.cols; }
};

struct SplitDataset {
    Dataset train;
    Dataset test;
};

/// Loads a CSV with a header row; the target is the last column.
/// Classification files may use {0,1} or {-1,+1} targets; 0/1 are mapped
/// to -1/+1. Throws ParseError with row/column context on bad cells and
/// DomainError on out-of-domain classification targets.
Dataset load_csv(const std::string& path, Task task);

/// Writes a CSV with header x1..xd,y. Classification targets go to disk
/// as {0,1}. Values round-trip exactly through load_csv.
void save_csv(const std::string& path, const Dataset& data);

/// Regression data: standard-normal features, a hidden standard-normal
/// hyperplane drawn from the seed, and targets y = w_true . x exactly.
Dataset gen_simulated1(std::size_t n, std::size_t d, std::uint64_t seed);

/// Returns the hidden hyperplane gen_simulated1 would use for this seed.
std::vector<double> simulated1_hyperplane(std::size_t d, std::uint64_t seed);

/// Classification data: standard-normal features; label +1 with
/// probability 0.95 above the hidden hyperplane and with probability
/// 0.05 below it.
Dataset gen_simulated2(std::size_t n, std::size_t d, std::uint64_t seed);

/// Seeded random split. |train| = round(n * train_fraction); throws
/// DomainError if either part would be empty.
SplitDataset split(const Dataset& data, double train_fraction, std::uint64_t seed);

/// Z-score standardization fitted on the train features and applied to
/// both parts. Constant columns are centered but not rescaled. Opt-in;
/// nothing in this library standardizes implicitly.
void standardize(SplitDataset& data);

}  // namespace mbp
