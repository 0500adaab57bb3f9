#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "finslerkit/field.hpp"

namespace fk {

// Rank-r array of scalar fields over an n-dimensional index range, row-major.
class FieldTensor {
public:
    FieldTensor() = default;
    FieldTensor(int n, int rank) : n_(n), rank_(rank), data_(count(n, rank), ScalarField::constant(0.0)) {}

    int dimension() const { return n_; }
    int rank() const { return rank_; }
    std::size_t size() const { return data_.size(); }

    template <typename... I>
    ScalarField& operator()(I... idx) { return data_[offset({static_cast<int>(idx)...})]; }
    template <typename... I>
    const ScalarField& operator()(I... idx) const { return data_[offset({static_cast<int>(idx)...})]; }

    ScalarField& flat(std::size_t k) { return data_[k]; }
    const ScalarField& flat(std::size_t k) const { return data_[k]; }

    // Multi-index of flat position k.
    std::vector<int> unflatten(std::size_t k) const {
        std::vector<int> idx(static_cast<std::size_t>(rank_));
        for (int r = rank_ - 1; r >= 0; --r) {
            idx[static_cast<std::size_t>(r)] = static_cast<int>(k % static_cast<std::size_t>(n_));
            k /= static_cast<std::size_t>(n_);
        }
        return idx;
    }

    bool is_zero() const {
        for (const auto& f : data_) {
            if (!f.is_zero()) return false;
        }
        return true;
    }

private:
    static std::size_t count(int n, int rank) {
        std::size_t c = 1;
        for (int r = 0; r < rank; ++r) c *= static_cast<std::size_t>(n);
        return c;
    }
    std::size_t offset(std::initializer_list<int> idx) const {
        std::size_t k = 0;
        for (int i : idx) k = k * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
        return k;
    }

    int n_ = 0;
    int rank_ = 0;
    std::vector<ScalarField> data_;
};

inline Eigen::VectorXd evaluate(EvalContext& ctx, const FieldTensor& T) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(T.size()));
    for (std::size_t k = 0; k < T.size(); ++k) v[static_cast<Eigen::Index>(k)] = ctx.value(T.flat(k));
    return v;
}

}  // namespace fk
