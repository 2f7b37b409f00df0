#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace seqdiag::nn {

/// Dense row-major float64 matrix with a lazily allocated gradient buffer.
/// Tensor is a cheap value handle: copies share one storage block (values
/// and gradient), so parameters captured by tape closures and mutated by the
/// optimizer stay in sync across all handles.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(int64_t rows, int64_t cols);
    static Tensor full(int64_t rows, int64_t cols, double value);
    static Tensor from(int64_t rows, int64_t cols, std::vector<double> values);
    static Tensor scalar(double value);

    bool defined() const { return storage_ != nullptr; }
    int64_t rows() const { return rows_; }
    int64_t cols() const { return cols_; }
    int64_t numel() const { return rows_ * cols_; }

    const std::vector<double>& values() const { return storage_->data; }
    std::vector<double>& values() { return storage_->data; }

    double at(int64_t r, int64_t c) const {
        return storage_->data[static_cast<size_t>(r * cols_ + c)];
    }
    double& at(int64_t r, int64_t c) {
        return storage_->data[static_cast<size_t>(r * cols_ + c)];
    }

    /// Value of a 1x1 tensor.
    double item() const;

    /// Gradient buffer, allocated (zeroed) on first access and visible
    /// through every handle to this storage.
    std::vector<double>& grad();
    bool has_grad() const { return storage_ && !storage_->grad.empty(); }
    void zero_grad();

    std::string shape_str() const;

    /// Deep copy with fresh storage (gradient not copied).
    Tensor clone() const;

    bool same_buffer(const Tensor& other) const { return storage_ == other.storage_; }

private:
    struct Storage {
        std::vector<double> data;
        std::vector<double> grad; // empty until first grad() access
    };

    Tensor(int64_t rows, int64_t cols, std::vector<double> values);

    int64_t rows_ = 0;
    int64_t cols_ = 0;
    std::shared_ptr<Storage> storage_;
};

} // namespace seqdiag::nn
