#include "amp/tensor.hpp"

#include <cmath>
#include <sstream>

#include "amp/error.hpp"
#include "amp/kernels.hpp"

namespace amp {

namespace {

std::size_t checked_numel(const std::vector<int>& shape) {
    if (shape.empty()) throw ShapeError("tensor shape must have at least one dimension");
    std::size_t n = 1;
    for (int d : shape) {
        if (d < 1) throw ShapeError("tensor dimensions must be >= 1, got " + std::to_string(d));
        n *= static_cast<std::size_t>(d);
    }
    return n;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape != b.shape) {
        throw ShapeError(std::string(op) + ": shape mismatch " + a.shape_str() +
                         " vs " + b.shape_str());
    }
}

}  // namespace

Tensor::Tensor(std::vector<int> s) : shape(std::move(s)) {
    data.assign(checked_numel(shape), 0.0f);
}

Tensor::Tensor(std::vector<int> s, std::vector<float> d)
    : shape(std::move(s)), data(std::move(d)) {
    if (checked_numel(shape) != data.size()) {
        throw ShapeError("tensor data length " + std::to_string(data.size()) +
                         " does not match shape " + shape_str());
    }
}

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << "x";
        os << shape[i];
    }
    os << "]";
    return os.str();
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2) {
        throw ShapeError("matmul requires rank-2 tensors, got " + a.shape_str() +
                         " and " + b.shape_str());
    }
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: inner dimensions differ, " + a.shape_str() +
                         " x " + b.shape_str());
    }
    Tensor c({a.rows(), b.cols()});
    kernels::gemm_nn(a.data.data(), a.cols(), b.data.data(), b.cols(),
                     c.data.data(), c.cols(), a.rows(), a.cols(), b.cols());
    return c;
}

Tensor softmax_rows(const Tensor& a) {
    if (a.rank() != 2) throw ShapeError("softmax_rows requires rank 2, got " + a.shape_str());
    Tensor out(a.shape);
    const int m = a.rows(), n = a.cols();
    for (int i = 0; i < m; ++i) {
        const float* x = a.row(i);
        float* y = out.row(i);
        float mx = x[0];
        for (int j = 0; j < n; ++j) {
            if (std::isnan(x[j])) throw NumericError("softmax_rows: NaN in input row " + std::to_string(i));
            if (x[j] > mx) mx = x[j];
        }
        double sum = 0.0;
        for (int j = 0; j < n; ++j) {
            y[j] = std::exp(x[j] - mx);
            sum += y[j];
        }
        const float inv = static_cast<float>(1.0 / sum);
        for (int j = 0; j < n; ++j) y[j] *= inv;
    }
    return out;
}

Tensor silu(const Tensor& a) {
    Tensor out(a.shape);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const float x = a.data[i];
        out.data[i] = x / (1.0f + std::exp(-x));
    }
    return out;
}

Tensor elementwise_mul(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "elementwise_mul");
    Tensor out(a.shape);
    kernels::mul(a.data.data(), b.data.data(), out.data.data(), a.size());
    return out;
}

Tensor elementwise_add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "elementwise_add");
    Tensor out(a.shape);
    kernels::add(a.data.data(), b.data.data(), out.data.data(), a.size());
    return out;
}

double l1_norm(const Tensor& a) {
    double sum = 0.0;
    for (float v : a.data) sum += std::fabs(v);
    return sum;
}

Tensor mean(const Tensor& a, int axis) {
    if (a.rank() != 2) throw ShapeError("mean requires rank 2, got " + a.shape_str());
    if (axis != 0 && axis != 1) throw ShapeError("mean: axis must be 0 or 1");
    const int m = a.rows(), n = a.cols();
    if (axis == 0) {
        Tensor out({n});
        for (int j = 0; j < n; ++j) {
            double sum = 0.0;
            for (int i = 0; i < m; ++i) sum += a.at(i, j);
            out.data[static_cast<std::size_t>(j)] = static_cast<float>(sum / m);
        }
        return out;
    }
    Tensor out({m});
    for (int i = 0; i < m; ++i) {
        double sum = 0.0;
        const float* x = a.row(i);
        for (int j = 0; j < n; ++j) sum += x[j];
        out.data[static_cast<std::size_t>(i)] = static_cast<float>(sum / n);
    }
    return out;
}

}  // namespace amp
