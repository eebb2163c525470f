#ifndef MTSCORE_AUTODIFF_HPP_
#define MTSCORE_AUTODIFF_HPP_

// Reverse-mode automatic differentiation over dense row-major matrices of
// doubles. Every operation records its parents and a backward closure on the
// result node; backward() replays the recorded nodes in reverse construction
// order.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mtscore {
class Rng;
}

namespace mtscore::ad {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  // 1×n row vector.
  static Matrix row(std::initializer_list<double> values);
  static Matrix row(std::span<const double> values);
  // Nested initializer: {{1, 2}, {3, 4}}.
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  bool same_shape(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> data() { return values_; }
  std::span<const double> data() const { return values_; }
  const std::vector<double>& values() const { return values_; }

  void fill(double v);
  bool all_finite() const;
  std::string shape_string() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

struct Node {
  Matrix value;
  Matrix grad;  // empty until first accumulation
  bool requires_grad = false;
  std::uint64_t seq = 0;  // global construction order
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward_fn;

  bool is_leaf() const { return !backward_fn; }
  void accumulate(const Matrix& g);
};

// Handle to a node in the computation graph. Copies share the node.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Matrix value, bool requires_grad = false);

  static Tensor parameter(Matrix value) { return Tensor(std::move(value), true); }
  static Tensor constant(Matrix value) { return Tensor(std::move(value), false); }

  bool defined() const { return node_ != nullptr; }
  const Matrix& value() const { return node_->value; }
  // Direct write access for optimizers and checkpoint loading.
  Matrix& mutable_value() { return node_->value; }
  std::size_t rows() const { return node_->value.rows(); }
  std::size_t cols() const { return node_->value.cols(); }
  std::size_t size() const { return node_->value.size(); }
  double item() const;

  bool requires_grad() const { return node_->requires_grad; }
  bool has_grad() const { return !node_->grad.empty(); }
  // Zero-filled matrix of the value's shape when no gradient was accumulated.
  Matrix grad() const;
  void zero_grad() { node_->grad = Matrix(); }

  Node* node() const { return node_.get(); }
  const std::shared_ptr<Node>& shared() const { return node_; }

  static Tensor from_node(std::shared_ptr<Node> n) {
    Tensor t;
    t.node_ = std::move(n);
    return t;
  }

 private:
  std::shared_ptr<Node> node_;
};

// Disables graph recording on the current thread for its lifetime. Results
// computed under the guard are plain values with no parents.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

// Recorded operations reachable from a root, in construction order.
class Tape {
 public:
  static Tape record(const Tensor& root);

  std::span<Node* const> nodes() const { return nodes_; }
  // Seeds the root gradient with ones and runs every backward closure in
  // reverse construction order. Leaf gradients accumulate across calls;
  // interior gradients are reset first.
  void replay();

 private:
  std::vector<Node*> nodes_;
};

// Populates grads of all requires-grad ancestors of a 1×1 loss.
void backward(const Tensor& loss);

// ---------------------------------------------------------------------------
// Operations

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);

enum class Elementwise { kAdd, kSub, kMul };
Tensor elementwise(const Tensor& a, const Tensor& b, Elementwise kind);

Tensor abs(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor transpose(const Tensor& a);
Tensor scale(const Tensor& a, double factor);
Tensor add_scalar(const Tensor& a, double offset);
// s must be 1×1.
Tensor scale_by(const Tensor& a, const Tensor& s);

// Softmax over a vector (1×n or n×1). Masked-out entries (mask[i] == false)
// get exactly zero weight.
Tensor softmax(const Tensor& a, std::optional<std::span<const bool>> mask = std::nullopt);
// Independent softmax over every row of a matrix.
Tensor softmax_rows(const Tensor& a);

// Mean of all entries, as 1×1.
Tensor reduce_mean(const Tensor& a);
// Column-wise mean over rows: n×d → 1×d.
Tensor mean_rows(const Tensor& a);
// Horizontal concatenation; all parts share the row count.
Tensor concat(std::span<const Tensor> parts);
Tensor concat(std::initializer_list<Tensor> parts);
Tensor slice_cols(const Tensor& a, std::size_t start, std::size_t count);
// Entry i of a flattened tensor, as 1×1.
Tensor select(const Tensor& a, std::size_t index);
// Adds a 1×d row to every row of an n×d matrix.
Tensor add_bias(const Tensor& a, const Tensor& bias);
// Row-wise normalization to zero mean and unit variance followed by a
// per-column gain and bias (both 1×d).
Tensor layer_norm(const Tensor& a, const Tensor& gain, const Tensor& bias,
                  double eps = 1e-5);
// Euclidean distance between two equal-length vectors, as 1×1.
Tensor euclid(const Tensor& u, const Tensor& v);
// Rows of a table picked by index: (V×d, n ids) → n×d.
Tensor gather_rows(const Tensor& table, std::span<const std::uint32_t> ids);
// Inverted dropout: kept entries are divided by (1 - p).
Tensor dropout(const Tensor& a, double p, Rng& rng);

}  // namespace mtscore::ad

#endif  // MTSCORE_AUTODIFF_HPP_
