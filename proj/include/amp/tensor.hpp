#pragma once

// Minimal dense tensor type: rank-1/2/3 arrays of f32, row-major,
// contiguous. Only the operations the transformer actually needs.
//
// Precision policy (applies project-wide): matrix products accumulate in
// f32 with k ascending; scalar reductions (l1_norm, mean, softmax row
// sums) accumulate in double. Declared here once, relied on everywhere.

#include <cstddef>
#include <string>
#include <vector>

namespace amp {

struct Tensor {
    std::vector<int> shape;
    std::vector<float> data;

    Tensor() = default;
    explicit Tensor(std::vector<int> s);
    Tensor(std::vector<int> s, std::vector<float> d);

    std::size_t size() const { return data.size(); }
    int rank() const { return static_cast<int>(shape.size()); }
    int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }

    // Number of rows / row width for rank-2 use.
    int rows() const { return shape.at(0); }
    int cols() const { return shape.at(1); }

    float& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols() + c]; }
    float at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols() + c]; }

    float* row(int r) { return data.data() + static_cast<std::size_t>(r) * cols(); }
    const float* row(int r) const { return data.data() + static_cast<std::size_t>(r) * cols(); }

    static Tensor zeros(std::vector<int> s) { return Tensor(std::move(s)); }

    std::string shape_str() const;
};

// C[m×n] = A[m×k] · B[k×n]. Throws ShapeError naming both shapes on
// mismatch.
Tensor matmul(const Tensor& a, const Tensor& b);

// Row-wise softmax with per-row max subtraction. Throws NumericError if
// any input entry is NaN.
Tensor softmax_rows(const Tensor& a);

// Elementwise x·sigmoid(x).
Tensor silu(const Tensor& a);

Tensor elementwise_mul(const Tensor& a, const Tensor& b);
Tensor elementwise_add(const Tensor& a, const Tensor& b);

// Sum of |entries|, accumulated in double.
double l1_norm(const Tensor& a);

// Mean over one axis of a rank-2 tensor: axis 0 averages rows (result
// length cols), axis 1 averages within each row (result length rows).
Tensor mean(const Tensor& a, int axis);

}  // namespace amp
