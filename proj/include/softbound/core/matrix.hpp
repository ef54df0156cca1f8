#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "softbound/error.hpp"

namespace softbound {

/// Dense row-major matrix. Holds frame features (T x D) or token features
/// (N x D). Construction validates that every entry is finite.
template <typename Scalar>
class BasicMatrix {
public:
    using value_type = Scalar;

    BasicMatrix() = default;

    BasicMatrix(std::size_t rows, std::size_t dim, Scalar fill = Scalar{0})
        : rows_(rows), dim_(dim), data_(rows * dim, fill) {}

    BasicMatrix(std::size_t rows, std::size_t dim, std::vector<Scalar> data)
        : rows_(rows), dim_(dim), data_(std::move(data)) {
        if (data_.size() != rows_ * dim_) {
            throw DimensionError("matrix data holds " + std::to_string(data_.size()) +
                                 " values, expected " + std::to_string(rows_ * dim_));
        }
        require_finite();
    }

    BasicMatrix(std::initializer_list<std::initializer_list<Scalar>> rows) {
        rows_ = rows.size();
        dim_ = rows_ ? rows.begin()->size() : 0;
        data_.reserve(rows_ * dim_);
        for (const auto& r : rows) {
            if (r.size() != dim_) throw DimensionError("ragged matrix literal");
            data_.insert(data_.end(), r.begin(), r.end());
        }
        require_finite();
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t dim() const noexcept { return dim_; }
    bool empty() const noexcept { return rows_ == 0 || dim_ == 0; }

    std::span<const Scalar> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
    std::span<Scalar> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }

    Scalar operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }
    Scalar& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }

    const std::vector<Scalar>& data() const noexcept { return data_; }

    /// Throws InvariantError naming the first row holding NaN or Inf.
    void require_finite() const {
        for (std::size_t k = 0; k < data_.size(); ++k) {
            if (!std::isfinite(data_[k])) {
                throw InvariantError("non-finite value at row " + std::to_string(k / dim_) +
                                     ", column " + std::to_string(k % dim_));
            }
        }
    }

    friend bool operator==(const BasicMatrix&, const BasicMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t dim_ = 0;
    std::vector<Scalar> data_;
};

using EmbeddingMatrix = BasicMatrix<double>;

/// Stacks matrices of equal width on top of each other.
template <typename Scalar>
BasicMatrix<Scalar> vstack(std::initializer_list<const BasicMatrix<Scalar>*> parts) {
    std::size_t rows = 0;
    std::size_t dim = (*parts.begin())->dim();
    for (const auto* p : parts) {
        if (p->dim() != dim) throw DimensionError("vstack: width mismatch");
        rows += p->rows();
    }
    std::vector<Scalar> data;
    data.reserve(rows * dim);
    for (const auto* p : parts) data.insert(data.end(), p->data().begin(), p->data().end());
    return BasicMatrix<Scalar>(rows, dim, std::move(data));
}

}  // namespace softbound
