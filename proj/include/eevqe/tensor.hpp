// Copyright 2026 The eevqe Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Dense complex tensors with row-major storage and pairwise contraction.
 */
#pragma once
#include "error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace eevqe {

using Complex = std::complex<double>;
/// Column-major dynamic complex matrix (Eigen default layout).
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RowMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Shape = std::vector<std::size_t>;

/// (leg of a, leg of b) pair to be summed over in contract().
using LegPair = std::pair<std::size_t, std::size_t>;

namespace detail {

inline std::size_t shape_size(const Shape &shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                           std::multiplies<>());
}

inline Shape row_major_strides(const Shape &shape) {
    Shape strides(shape.size(), 1);
    for (std::size_t k = shape.size(); k-- > 1;) {
        strides[k - 1] = strides[k] * shape[k];
    }
    return strides;
}

inline std::string shape_string(const Shape &shape) {
    std::string out = "(";
    for (std::size_t k = 0; k < shape.size(); ++k) {
        out += (k ? "," : "") + std::to_string(shape[k]);
    }
    return out + ")";
}

/**
 * @brief Write `src` (row-major over `shape`) into `dst` with legs reordered
 * so that output leg k is input leg perm[k].
 */
inline void permute_into(const Complex *src, const Shape &shape,
                         std::span<const std::size_t> perm, Complex *dst) {
    const std::size_t total = shape_size(shape);
    if (shape.empty()) {
        dst[0] = src[0];
        return;
    }
    // Output legs that stay adjacent in the input move as one leg.
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    for (std::size_t k = 0; k < perm.size(); ++k) {
        if (!groups.empty() &&
            perm[k] == groups.back().first + groups.back().second) {
            ++groups.back().second;
        } else {
            groups.emplace_back(perm[k], 1);
        }
    }
    std::vector<std::size_t> by_input(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        by_input[g] = g;
    }
    std::sort(by_input.begin(), by_input.end(),
              [&](std::size_t a, std::size_t b) {
                  return groups[a].first < groups[b].first;
              });
    const std::size_t rank = groups.size();
    Shape merged(rank);
    Shape slot(rank);
    for (std::size_t n = 0; n < rank; ++n) {
        const auto &[first, len] = groups[by_input[n]];
        std::size_t d = 1;
        for (std::size_t k = first; k < first + len; ++k) {
            d *= shape[k];
        }
        merged[n] = d;
        slot[by_input[n]] = n;
    }
    const Shape in_strides = row_major_strides(merged);
    Shape out_dims(rank);
    Shape step(rank);
    for (std::size_t k = 0; k < rank; ++k) {
        out_dims[k] = merged[slot[k]];
        step[k] = in_strides[slot[k]];
    }
    Shape counter(rank, 0);
    std::size_t offset = 0;
    const std::size_t last = rank - 1;
    for (std::size_t n = 0; n < total;) {
        // Innermost leg as a tight loop.
        const std::size_t inner = out_dims[last];
        const std::size_t s = step[last];
        for (std::size_t i = 0; i < inner; ++i) {
            dst[n++] = src[offset + i * s];
        }
        for (std::size_t k = last; k-- > 0;) {
            offset += step[k];
            if (++counter[k] < out_dims[k]) {
                break;
            }
            offset -= step[k] * out_dims[k];
            counter[k] = 0;
        }
    }
}

} // namespace detail

/**
 * @brief Dense complex tensor. Legs are ordered (inputs..., outputs...) and
 * data is row-major over legs, so the last leg varies fastest.
 */
class Tensor {
  public:
    Tensor() : shape_{}, data_(1, Complex{0.0, 0.0}) {}

    explicit Tensor(Shape shape)
        : shape_{std::move(shape)}, data_(detail::shape_size(shape_)) {
        validate_shape();
    }

    Tensor(Shape shape, std::vector<Complex> data)
        : shape_{std::move(shape)}, data_{std::move(data)} {
        validate_shape();
        require(data_.size() == detail::shape_size(shape_),
                ErrorKind::DimensionMismatch,
                "tensor data has " + std::to_string(data_.size()) +
                    " entries but shape " + detail::shape_string(shape_) +
                    " needs " + std::to_string(detail::shape_size(shape_)));
    }

    /**
     * @brief Build a tensor from a matrix whose rows run over the leading legs
     * of `shape` and whose columns run over the trailing legs.
     */
    static Tensor from_matrix(const Matrix &m, Shape shape) {
        require(static_cast<std::size_t>(m.size()) ==
                    detail::shape_size(shape),
                ErrorKind::DimensionMismatch,
                "matrix " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()) + " does not fit shape " +
                    detail::shape_string(shape));
        std::vector<Complex> data(static_cast<std::size_t>(m.size()));
        Eigen::Map<RowMatrix>(data.data(), m.rows(), m.cols()) = m;
        return Tensor(std::move(shape), std::move(data));
    }

    [[nodiscard]] const Shape &shape() const noexcept { return shape_; }
    [[nodiscard]] std::size_t rank() const noexcept { return shape_.size(); }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] std::size_t dim(std::size_t leg) const {
        return shape_.at(leg);
    }

    [[nodiscard]] std::span<const Complex> data() const noexcept {
        return data_;
    }
    [[nodiscard]] std::span<Complex> data() noexcept { return data_; }

    [[nodiscard]] Complex &operator[](std::size_t flat) { return data_[flat]; }
    [[nodiscard]] const Complex &operator[](std::size_t flat) const {
        return data_[flat];
    }

    /// Element access by multi-index.
    [[nodiscard]] const Complex &at(std::span<const std::size_t> idx) const {
        return data_[flat_index(idx)];
    }
    [[nodiscard]] Complex &at(std::span<const std::size_t> idx) {
        return data_[flat_index(idx)];
    }

    /// Output leg k is input leg perm[k].
    [[nodiscard]] Tensor permute(std::span<const std::size_t> perm) const {
        check_permutation(perm);
        Shape out_shape(rank());
        for (std::size_t k = 0; k < rank(); ++k) {
            out_shape[k] = shape_[perm[k]];
        }
        Tensor out(std::move(out_shape));
        detail::permute_into(data_.data(), shape_, perm, out.data_.data());
        return out;
    }

    [[nodiscard]] Tensor reshape(Shape shape) const {
        require(detail::shape_size(shape) == size(),
                ErrorKind::DimensionMismatch,
                "cannot reshape " + detail::shape_string(shape_) + " to " +
                    detail::shape_string(shape));
        return Tensor(std::move(shape), data_);
    }

    [[nodiscard]] Tensor conj() const {
        Tensor out(shape_);
        for (std::size_t n = 0; n < size(); ++n) {
            out.data_[n] = std::conj(data_[n]);
        }
        return out;
    }

    /// View as a matrix: leading `row_legs` legs index rows.
    [[nodiscard]] Matrix matrix(std::size_t row_legs) const {
        require(row_legs <= rank(), ErrorKind::InvalidArgument,
                "row leg count exceeds tensor rank");
        std::size_t rows = 1;
        for (std::size_t k = 0; k < row_legs; ++k) {
            rows *= shape_[k];
        }
        const std::size_t cols = size() / rows;
        return Eigen::Map<const RowMatrix>(data_.data(),
                                           static_cast<Eigen::Index>(rows),
                                           static_cast<Eigen::Index>(cols));
    }

    [[nodiscard]] double norm() const {
        double acc = 0.0;
        for (const auto &v : data_) {
            acc += std::norm(v);
        }
        return std::sqrt(acc);
    }

  private:
    void validate_shape() const {
        for (std::size_t d : shape_) {
            require(d > 0, ErrorKind::InvalidArgument,
                    "tensor legs must have positive dimension, got shape " +
                        detail::shape_string(shape_));
        }
    }

    void check_permutation(std::span<const std::size_t> perm) const {
        std::vector<bool> seen(rank(), false);
        bool ok = perm.size() == rank();
        for (std::size_t k = 0; ok && k < perm.size(); ++k) {
            ok = perm[k] < rank() && !seen[perm[k]];
            if (ok) {
                seen[perm[k]] = true;
            }
        }
        require(ok, ErrorKind::InvalidArgument,
                "invalid permutation for tensor of rank " +
                    std::to_string(rank()));
    }

    [[nodiscard]] std::size_t
    flat_index(std::span<const std::size_t> idx) const {
        require(idx.size() == rank(), ErrorKind::InvalidArgument,
                "index rank mismatch");
        std::size_t flat = 0;
        for (std::size_t k = 0; k < rank(); ++k) {
            require(idx[k] < shape_[k], ErrorKind::InvalidArgument,
                    "index out of range on leg " + std::to_string(k));
            flat = flat * shape_[k] + idx[k];
        }
        return flat;
    }

    Shape shape_;
    std::vector<Complex> data_;
};

/**
 * @brief Sum over the paired legs of `a` and `b`.
 *
 * The result carries the unpaired legs of `a` followed by the unpaired legs
 * of `b`, each in their original order.
 */
[[nodiscard]] inline Tensor contract(const Tensor &a, const Tensor &b,
                                     std::span<const LegPair> pairs) {
    std::vector<bool> used_a(a.rank(), false);
    std::vector<bool> used_b(b.rank(), false);
    std::size_t inner = 1;
    for (const auto &[la, lb] : pairs) {
        require(la < a.rank() && lb < b.rank(), ErrorKind::InvalidArgument,
                "contraction leg out of range: (" + std::to_string(la) + ", " +
                    std::to_string(lb) + ")");
        require(!used_a[la] && !used_b[lb], ErrorKind::InvalidArgument,
                "contraction leg paired twice: (" + std::to_string(la) + ", " +
                    std::to_string(lb) + ")");
        if (a.dim(la) != b.dim(lb)) {
            throw Error(ErrorKind::DimensionMismatch,
                        "leg " + std::to_string(la) + " of a has dimension " +
                            std::to_string(a.dim(la)) + " but leg " +
                            std::to_string(lb) + " of b has dimension " +
                            std::to_string(b.dim(lb)));
        }
        used_a[la] = true;
        used_b[lb] = true;
        inner *= a.dim(la);
    }

    std::vector<std::size_t> perm_a;
    std::vector<std::size_t> perm_b;
    Shape out_shape;
    std::size_t rows = 1;
    std::size_t cols = 1;
    for (std::size_t k = 0; k < a.rank(); ++k) {
        if (!used_a[k]) {
            perm_a.push_back(k);
            out_shape.push_back(a.dim(k));
            rows *= a.dim(k);
        }
    }
    for (const auto &p : pairs) {
        perm_a.push_back(p.first);
        perm_b.push_back(p.second);
    }
    for (std::size_t k = 0; k < b.rank(); ++k) {
        if (!used_b[k]) {
            perm_b.push_back(k);
            out_shape.push_back(b.dim(k));
            cols *= b.dim(k);
        }
    }

    const Tensor pa = a.permute(perm_a);
    const Tensor pb = b.permute(perm_b);
    const auto r = static_cast<Eigen::Index>(rows);
    const auto c = static_cast<Eigen::Index>(cols);
    const auto n = static_cast<Eigen::Index>(inner);
    Tensor out(out_shape);
    Eigen::Map<RowMatrix>(out.data().data(), r, c).noalias() =
        Eigen::Map<const RowMatrix>(pa.data().data(), r, n) *
        Eigen::Map<const RowMatrix>(pb.data().data(), n, c);
    return out;
}

[[nodiscard]] inline Tensor contract(const Tensor &a, const Tensor &b,
                                     std::initializer_list<LegPair> pairs) {
    return contract(a, b,
                    std::span<const LegPair>(pairs.begin(), pairs.size()));
}

} // namespace eevqe
