#include "tensor/tensor.hpp"

#include "common/error.hpp"

#include <algorithm>

namespace seqdiag::nn {

Tensor::Tensor(int64_t rows, int64_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols),
      storage_(std::make_shared<Storage>(Storage{std::move(values), {}})) {}

Tensor Tensor::zeros(int64_t rows, int64_t cols) {
    return full(rows, cols, 0.0);
}

Tensor Tensor::full(int64_t rows, int64_t cols, double value) {
    if (rows < 1 || cols < 1)
        raise(Status::InvalidArgument, "tensor dimensions must be positive");
    return Tensor(rows, cols,
                  std::vector<double>(static_cast<size_t>(rows * cols), value));
}

Tensor Tensor::from(int64_t rows, int64_t cols, std::vector<double> values) {
    if (rows < 1 || cols < 1)
        raise(Status::InvalidArgument, "tensor dimensions must be positive");
    if (static_cast<int64_t>(values.size()) != rows * cols)
        raise(Status::ShapeMismatch,
              "value count " + std::to_string(values.size()) + " does not fill (" +
                  std::to_string(rows) + "," + std::to_string(cols) + ")");
    return Tensor(rows, cols, std::move(values));
}

Tensor Tensor::scalar(double value) {
    return Tensor(1, 1, {value});
}

double Tensor::item() const {
    if (numel() != 1)
        raise(Status::ShapeMismatch, "item() on non-scalar tensor " + shape_str());
    return storage_->data[0];
}

std::vector<double>& Tensor::grad() {
    if (storage_->grad.empty())
        storage_->grad.assign(static_cast<size_t>(numel()), 0.0);
    return storage_->grad;
}

void Tensor::zero_grad() {
    if (storage_ && !storage_->grad.empty())
        std::fill(storage_->grad.begin(), storage_->grad.end(), 0.0);
}

std::string Tensor::shape_str() const {
    return "(" + std::to_string(rows_) + "," + std::to_string(cols_) + ")";
}

Tensor Tensor::clone() const {
    return Tensor(rows_, cols_, storage_->data);
}

} // namespace seqdiag::nn
