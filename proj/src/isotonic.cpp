#include "mbp/isotonic.hpp"

#include <algorithm>

#include "mbp/errors.hpp"

namespace mbp {

std::vector<double> isotonic_increasing(std::span<const double> y,
                                        std::span<const double> w) {
    const std::size_t n = y.size();
    if (!w.empty() && w.size() != n) {
        throw DomainError("isotonic regression: weight length mismatch");
    }
    struct Block {
        double value;
        double weight;
        std::size_t count;
    };
    std::vector<Block> blocks;
    blocks.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        blocks.push_back({y[i], w.empty() ? 1.0 : w[i], 1});
        while (blocks.size() >= 2 &&
               blocks[blocks.size() - 2].value >= blocks.back().value) {
            const Block top = blocks.back();
            blocks.pop_back();
            Block& prev = blocks.back();
            const double total = prev.weight + top.weight;
            prev.value = (prev.value * prev.weight + top.value * top.weight) / total;
            prev.weight = total;
            prev.count += top.count;
        }
    }
    std::vector<double> fit;
    fit.reserve(n);
    for (const Block& b : blocks) fit.insert(fit.end(), b.count, b.value);
    return fit;
}

std::vector<double> isotonic_decreasing(std::span<const double> y,
                                        std::span<const double> w) {
    std::vector<double> negated(y.begin(), y.end());
    for (auto& v : negated) v = -v;
    auto fit = isotonic_increasing(negated, w);
    for (auto& v : fit) v = -v;
    return fit;
}

}  // namespace mbp
