#include "mtscore/autodiff.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <unordered_set>
#include <utility>

#include "mtscore/error.hpp"
#include "mtscore/rng.hpp"

namespace mtscore::ad {

namespace {

std::atomic<std::uint64_t> g_seq{0};
thread_local bool t_grad_enabled = true;

std::uint64_t next_seq() { return g_seq.fetch_add(1, std::memory_order_relaxed); }

Tensor make_result(Matrix value, std::vector<std::shared_ptr<Node>> parents,
                   std::function<void(Node&)> fn) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->seq = next_seq();
  bool needs = false;
  if (t_grad_enabled) {
    for (const auto& p : parents) needs = needs || p->requires_grad;
  }
  if (needs) {
    n->requires_grad = true;
    n->parents = std::move(parents);
    n->backward_fn = std::move(fn);
  }
  return Tensor::from_node(std::move(n));
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(op) + ": shape mismatch " + a.shape_string() +
                         " vs " + b.shape_string());
  }
}

bool is_vector(const Matrix& m) { return m.rows() == 1 || m.cols() == 1; }

}  // namespace

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw DimensionError("Matrix: " + std::to_string(values_.size()) +
                         " values for shape " + shape_string());
  }
}

Matrix Matrix::row(std::initializer_list<double> values) {
  return Matrix(1, values.size(), std::vector<double>(values));
}

Matrix Matrix::row(std::span<const double> values) {
  return Matrix(1, values.size(), std::vector<double>(values.begin(), values.end()));
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> v;
  v.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionError("Matrix::from_rows: ragged rows");
    v.insert(v.end(), row.begin(), row.end());
  }
  return Matrix(r, c, std::move(v));
}

void Matrix::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

bool Matrix::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double x) { return std::isfinite(x); });
}

std::string Matrix::shape_string() const {
  return "(" + std::to_string(rows_) + "x" + std::to_string(cols_) + ")";
}

// ---------------------------------------------------------------------------
// Node / Tensor

void Node::accumulate(const Matrix& g) {
  if (grad.empty()) {
    grad = g;
    return;
  }
  auto dst = grad.data();
  auto src = g.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

Tensor::Tensor(Matrix value, bool requires_grad) : node_(std::make_shared<Node>()) {
  node_->value = std::move(value);
  node_->requires_grad = requires_grad;
  node_->seq = next_seq();
}

double Tensor::item() const {
  if (size() != 1) {
    throw DimensionError("item: tensor is " + value().shape_string() + ", not 1x1");
  }
  return value()[0];
}

Matrix Tensor::grad() const {
  if (node_->grad.empty()) return Matrix(rows(), cols());
  return node_->grad;
}

NoGradGuard::NoGradGuard() : previous_(t_grad_enabled) { t_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { t_grad_enabled = previous_; }

bool grad_enabled() { return t_grad_enabled; }

// ---------------------------------------------------------------------------
// Tape

Tape Tape::record(const Tensor& root) {
  Tape tape;
  std::unordered_set<Node*> seen;
  std::vector<Node*> stack{root.node()};
  while (!stack.empty()) {
    Node* n = stack.back();
    stack.pop_back();
    if (!n->requires_grad || !seen.insert(n).second) continue;
    tape.nodes_.push_back(n);
    for (const auto& p : n->parents) stack.push_back(p.get());
  }
  std::sort(tape.nodes_.begin(), tape.nodes_.end(),
            [](const Node* a, const Node* b) { return a->seq < b->seq; });
  return tape;
}

void Tape::replay() {
  if (nodes_.empty()) return;
  for (Node* n : nodes_) {
    if (!n->is_leaf()) n->grad = Matrix();
  }
  Node* root = nodes_.back();
  root->accumulate(Matrix(root->value.rows(), root->value.cols(), 1.0));
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    Node* n = *it;
    if (n->is_leaf() || n->grad.empty()) continue;
    n->backward_fn(*n);
  }
}

void backward(const Tensor& loss) {
  if (!loss.defined() || loss.size() != 1) {
    throw ContractError("backward: loss must be a 1x1 tensor");
  }
  Tape::record(loss).replay();
}

// ---------------------------------------------------------------------------
// Operations

Tensor matmul(const Tensor& a, const Tensor& b) {
  const Matrix& A = a.value();
  const Matrix& B = b.value();
  if (A.cols() != B.rows()) {
    throw DimensionError("matmul: " + A.shape_string() + " x " + B.shape_string());
  }
  const std::size_t n = A.rows(), m = A.cols(), p = B.cols();
  Matrix C(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      const double aik = A(i, k);
      for (std::size_t j = 0; j < p; ++j) C(i, j) += aik * B(k, j);
    }
  }
  return make_result(std::move(C), {a.shared(), b.shared()}, [n, m, p](Node& self) {
    Node& pa = *self.parents[0];
    Node& pb = *self.parents[1];
    const Matrix& G = self.grad;
    if (pa.requires_grad) {
      Matrix dA(n, m);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < m; ++k) {
          double s = 0.0;
          for (std::size_t j = 0; j < p; ++j) s += G(i, j) * pb.value(k, j);
          dA(i, k) = s;
        }
      pa.accumulate(dA);
    }
    if (pb.requires_grad) {
      Matrix dB(m, p);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < m; ++k) {
          const double aik = pa.value(i, k);
          for (std::size_t j = 0; j < p; ++j) dB(k, j) += aik * G(i, j);
        }
      pb.accumulate(dB);
    }
  });
}

Tensor elementwise(const Tensor& a, const Tensor& b, Elementwise kind) {
  require_same_shape(a.value(), b.value(), "elementwise");
  const auto& x = a.value();
  const auto& y = b.value();
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < out.size(); ++i) {
    switch (kind) {
      case Elementwise::kAdd: out[i] = x[i] + y[i]; break;
      case Elementwise::kSub: out[i] = x[i] - y[i]; break;
      case Elementwise::kMul: out[i] = x[i] * y[i]; break;
    }
  }
  return make_result(std::move(out), {a.shared(), b.shared()}, [kind](Node& self) {
    Node& pa = *self.parents[0];
    Node& pb = *self.parents[1];
    const Matrix& G = self.grad;
    switch (kind) {
      case Elementwise::kAdd:
        if (pa.requires_grad) pa.accumulate(G);
        if (pb.requires_grad) pb.accumulate(G);
        break;
      case Elementwise::kSub:
        if (pa.requires_grad) pa.accumulate(G);
        if (pb.requires_grad) {
          Matrix d = G;
          for (auto& v : d.data()) v = -v;
          pb.accumulate(d);
        }
        break;
      case Elementwise::kMul:
        if (pa.requires_grad) {
          Matrix d = G;
          for (std::size_t i = 0; i < d.size(); ++i) d[i] *= pb.value[i];
          pa.accumulate(d);
        }
        if (pb.requires_grad) {
          Matrix d = G;
          for (std::size_t i = 0; i < d.size(); ++i) d[i] *= pa.value[i];
          pb.accumulate(d);
        }
        break;
    }
  });
}

Tensor add(const Tensor& a, const Tensor& b) { return elementwise(a, b, Elementwise::kAdd); }
Tensor sub(const Tensor& a, const Tensor& b) { return elementwise(a, b, Elementwise::kSub); }
Tensor mul(const Tensor& a, const Tensor& b) { return elementwise(a, b, Elementwise::kMul); }

namespace {

// Pointwise op with derivative computed from (input, output).
template <typename F, typename D>
Tensor unary(const Tensor& a, F f, D df) {
  const Matrix& x = a.value();
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = f(x[i]);
  return make_result(std::move(out), {a.shared()}, [df](Node& self) {
    Node& p = *self.parents[0];
    Matrix d = self.grad;
    for (std::size_t i = 0; i < d.size(); ++i) d[i] *= df(p.value[i], self.value[i]);
    p.accumulate(d);
  });
}

}  // namespace

Tensor abs(const Tensor& a) {
  return unary(
      a, [](double x) { return std::fabs(x); },
      [](double x, double) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Tensor tanh(const Tensor& a) {
  return unary(
      a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor relu(const Tensor& a) {
  return unary(
      a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor scale(const Tensor& a, double factor) {
  return unary(
      a, [factor](double x) { return factor * x; },
      [factor](double, double) { return factor; });
}

Tensor add_scalar(const Tensor& a, double offset) {
  return unary(
      a, [offset](double x) { return x + offset; }, [](double, double) { return 1.0; });
}

Tensor transpose(const Tensor& a) {
  const Matrix& x = a.value();
  Matrix out(x.cols(), x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) out(j, i) = x(i, j);
  return make_result(std::move(out), {a.shared()}, [](Node& self) {
    const Matrix& G = self.grad;
    Matrix d(G.cols(), G.rows());
    for (std::size_t i = 0; i < G.rows(); ++i)
      for (std::size_t j = 0; j < G.cols(); ++j) d(j, i) = G(i, j);
    self.parents[0]->accumulate(d);
  });
}

Tensor scale_by(const Tensor& a, const Tensor& s) {
  if (s.size() != 1) {
    throw DimensionError("scale_by: scale must be 1x1, got " + s.value().shape_string());
  }
  const double k = s.value()[0];
  Matrix out = a.value();
  for (auto& v : out.data()) v *= k;
  return make_result(std::move(out), {a.shared(), s.shared()}, [](Node& self) {
    Node& pa = *self.parents[0];
    Node& ps = *self.parents[1];
    const Matrix& G = self.grad;
    if (pa.requires_grad) {
      Matrix d = G;
      for (auto& v : d.data()) v *= ps.value[0];
      pa.accumulate(d);
    }
    if (ps.requires_grad) {
      double acc = 0.0;
      for (std::size_t i = 0; i < G.size(); ++i) acc += G[i] * pa.value[i];
      ps.accumulate(Matrix(1, 1, acc));
    }
  });
}

namespace {

// Softmax of one contiguous run of logits; entries with keep[i] == false are 0.
void softmax_span(std::span<const double> x, std::span<double> y,
                  std::span<const bool> keep) {
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i)
    if (keep.empty() || keep[i]) mx = std::max(mx, x[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (keep.empty() || keep[i]) {
      y[i] = std::exp(x[i] - mx);
      sum += y[i];
    } else {
      y[i] = 0.0;
    }
  }
  for (auto& v : y) v /= sum;
}

void softmax_span_backward(std::span<const double> y, std::span<const double> g,
                           std::span<double> dx) {
  double dot = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) dot += g[i] * y[i];
  for (std::size_t i = 0; i < y.size(); ++i) dx[i] = y[i] * (g[i] - dot);
}

}  // namespace

Tensor softmax(const Tensor& a, std::optional<std::span<const bool>> mask) {
  const Matrix& x = a.value();
  if (!is_vector(x) || x.empty()) {
    throw DimensionError("softmax: expected a non-empty vector, got " + x.shape_string());
  }
  std::span<const bool> keep;
  if (mask) {
    if (mask->size() != x.size()) {
      throw DimensionError("softmax: mask length " + std::to_string(mask->size()) +
                           " != " + std::to_string(x.size()));
    }
    if (std::none_of(mask->begin(), mask->end(), [](bool b) { return b; })) {
      throw ContractError("softmax: invalid mask, every entry is masked");
    }
    keep = *mask;
  }
  Matrix out(x.rows(), x.cols());
  softmax_span(x.data(), out.data(), keep);
  return make_result(std::move(out), {a.shared()}, [](Node& self) {
    Matrix d(self.value.rows(), self.value.cols());
    softmax_span_backward(self.value.data(), self.grad.data(), d.data());
    self.parents[0]->accumulate(d);
  });
}

Tensor softmax_rows(const Tensor& a) {
  const Matrix& x = a.value();
  const std::size_t r = x.rows(), c = x.cols();
  Matrix out(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    softmax_span(x.data().subspan(i * c, c), out.data().subspan(i * c, c), {});
  }
  return make_result(std::move(out), {a.shared()}, [r, c](Node& self) {
    Matrix d(r, c);
    for (std::size_t i = 0; i < r; ++i) {
      softmax_span_backward(self.value.data().subspan(i * c, c),
                            self.grad.data().subspan(i * c, c),
                            d.data().subspan(i * c, c));
    }
    self.parents[0]->accumulate(d);
  });
}

Tensor reduce_mean(const Tensor& a) {
  const Matrix& x = a.value();
  if (x.empty()) throw DimensionError("reduce_mean: empty tensor");
  double s = 0.0;
  for (double v : x.data()) s += v;
  const double n = static_cast<double>(x.size());
  return make_result(Matrix(1, 1, s / n), {a.shared()}, [](Node& self) {
    Node& p = *self.parents[0];
    const double g = self.grad[0] / static_cast<double>(p.value.size());
    p.accumulate(Matrix(p.value.rows(), p.value.cols(), g));
  });
}

Tensor mean_rows(const Tensor& a) {
  const Matrix& x = a.value();
  if (x.rows() == 0) throw DimensionError("mean_rows: no rows");
  const std::size_t r = x.rows(), c = x.cols();
  Matrix out(1, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out(0, j) += x(i, j);
  for (auto& v : out.data()) v /= static_cast<double>(r);
  return make_result(std::move(out), {a.shared()}, [r, c](Node& self) {
    Matrix d(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) d(i, j) = self.grad(0, j) / static_cast<double>(r);
    self.parents[0]->accumulate(d);
  });
}

Tensor concat(std::span<const Tensor> parts) {
  if (parts.empty()) throw DimensionError("concat: no parts");
  const std::size_t r = parts.front().rows();
  std::size_t c = 0;
  std::vector<std::size_t> widths;
  std::vector<std::shared_ptr<Node>> parents;
  for (const auto& p : parts) {
    if (p.rows() != r) {
      throw DimensionError("concat: row mismatch " + p.value().shape_string());
    }
    widths.push_back(p.cols());
    parents.push_back(p.shared());
    c += p.cols();
  }
  Matrix out(r, c);
  std::size_t off = 0;
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < p.cols(); ++j) out(i, off + j) = p.value()(i, j);
    off += p.cols();
  }
  return make_result(std::move(out), std::move(parents), [r, widths](Node& self) {
    std::size_t off = 0;
    for (std::size_t k = 0; k < widths.size(); ++k) {
      Node& p = *self.parents[k];
      if (p.requires_grad) {
        Matrix d(r, widths[k]);
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < widths[k]; ++j) d(i, j) = self.grad(i, off + j);
        p.accumulate(d);
      }
      off += widths[k];
    }
  });
}

Tensor concat(std::initializer_list<Tensor> parts) {
  return concat(std::span<const Tensor>(parts.begin(), parts.size()));
}

Tensor slice_cols(const Tensor& a, std::size_t start, std::size_t count) {
  const Matrix& x = a.value();
  if (start + count > x.cols()) {
    throw DimensionError("slice_cols: [" + std::to_string(start) + ", " +
                         std::to_string(start + count) + ") out of " + x.shape_string());
  }
  const std::size_t r = x.rows(), c = x.cols();
  Matrix out(r, count);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < count; ++j) out(i, j) = x(i, start + j);
  return make_result(std::move(out), {a.shared()}, [r, c, start, count](Node& self) {
    Matrix d(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < count; ++j) d(i, start + j) = self.grad(i, j);
    self.parents[0]->accumulate(d);
  });
}

Tensor select(const Tensor& a, std::size_t index) {
  const Matrix& x = a.value();
  if (index >= x.size()) {
    throw DimensionError("select: index " + std::to_string(index) + " out of " +
                         x.shape_string());
  }
  return make_result(Matrix(1, 1, x[index]), {a.shared()}, [index](Node& self) {
    Node& p = *self.parents[0];
    Matrix d(p.value.rows(), p.value.cols());
    d[index] = self.grad[0];
    p.accumulate(d);
  });
}

Tensor add_bias(const Tensor& a, const Tensor& bias) {
  const Matrix& x = a.value();
  const Matrix& b = bias.value();
  if (b.rows() != 1 || b.cols() != x.cols()) {
    throw DimensionError("add_bias: bias " + b.shape_string() + " for " + x.shape_string());
  }
  const std::size_t r = x.rows(), c = x.cols();
  Matrix out = x;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out(i, j) += b(0, j);
  return make_result(std::move(out), {a.shared(), bias.shared()}, [r, c](Node& self) {
    Node& pa = *self.parents[0];
    Node& pb = *self.parents[1];
    if (pa.requires_grad) pa.accumulate(self.grad);
    if (pb.requires_grad) {
      Matrix d(1, c);
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) d(0, j) += self.grad(i, j);
      pb.accumulate(d);
    }
  });
}

Tensor layer_norm(const Tensor& a, const Tensor& gain, const Tensor& bias, double eps) {
  const Matrix& x = a.value();
  const std::size_t r = x.rows(), c = x.cols();
  if (gain.rows() != 1 || gain.cols() != c || bias.rows() != 1 || bias.cols() != c) {
    throw DimensionError("layer_norm: gain/bias must be 1x" + std::to_string(c));
  }
  Matrix xhat(r, c);
  std::vector<double> inv_std(r);
  for (std::size_t i = 0; i < r; ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < c; ++j) mean += x(i, j);
    mean /= static_cast<double>(c);
    double var = 0.0;
    for (std::size_t j = 0; j < c; ++j) var += (x(i, j) - mean) * (x(i, j) - mean);
    var /= static_cast<double>(c);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < c; ++j) xhat(i, j) = (x(i, j) - mean) * inv_std[i];
  }
  Matrix out(r, c);
  const Matrix& g = gain.value();
  const Matrix& b = bias.value();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out(i, j) = xhat(i, j) * g(0, j) + b(0, j);

  return make_result(
      std::move(out), {a.shared(), gain.shared(), bias.shared()},
      [r, c, xhat = std::move(xhat), inv_std = std::move(inv_std)](Node& self) {
        Node& px = *self.parents[0];
        Node& pg = *self.parents[1];
        Node& pb = *self.parents[2];
        const Matrix& G = self.grad;
        if (px.requires_grad) {
          Matrix dx(r, c);
          const double n = static_cast<double>(c);
          for (std::size_t i = 0; i < r; ++i) {
            double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
            for (std::size_t j = 0; j < c; ++j) {
              const double dxh = G(i, j) * pg.value(0, j);
              sum_dxhat += dxh;
              sum_dxhat_xhat += dxh * xhat(i, j);
            }
            for (std::size_t j = 0; j < c; ++j) {
              const double dxh = G(i, j) * pg.value(0, j);
              dx(i, j) = inv_std[i] * (dxh - sum_dxhat / n - xhat(i, j) * sum_dxhat_xhat / n);
            }
          }
          px.accumulate(dx);
        }
        if (pg.requires_grad || pb.requires_grad) {
          Matrix dg(1, c), db(1, c);
          for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) {
              dg(0, j) += G(i, j) * xhat(i, j);
              db(0, j) += G(i, j);
            }
          if (pg.requires_grad) pg.accumulate(dg);
          if (pb.requires_grad) pb.accumulate(db);
        }
      });
}

Tensor euclid(const Tensor& u, const Tensor& v) {
  const Matrix& x = u.value();
  const Matrix& y = v.value();
  if (!is_vector(x) || !is_vector(y) || x.size() != y.size()) {
    throw DimensionError("euclid: expected equal-length vectors, got " + x.shape_string() +
                         " and " + y.shape_string());
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) ss += (x[i] - y[i]) * (x[i] - y[i]);
  const double dist = std::sqrt(ss);
  return make_result(Matrix(1, 1, dist), {u.shared(), v.shared()}, [](Node& self) {
    Node& pu = *self.parents[0];
    Node& pv = *self.parents[1];
    const double dist = self.value[0];
    // Coincident points: gradient defined as zero.
    if (dist == 0.0) return;
    const double g = self.grad[0] / dist;
    Matrix du(pu.value.rows(), pu.value.cols());
    Matrix dv(pv.value.rows(), pv.value.cols());
    for (std::size_t i = 0; i < du.size(); ++i) {
      const double diff = pu.value[i] - pv.value[i];
      du[i] = g * diff;
      dv[i] = -g * diff;
    }
    if (pu.requires_grad) pu.accumulate(du);
    if (pv.requires_grad) pv.accumulate(dv);
  });
}

Tensor gather_rows(const Tensor& table, std::span<const std::uint32_t> ids) {
  const Matrix& t = table.value();
  const std::size_t c = t.cols();
  Matrix out(ids.size(), c);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= t.rows()) {
      throw DimensionError("gather_rows: id " + std::to_string(ids[i]) + " out of " +
                           t.shape_string());
    }
    for (std::size_t j = 0; j < c; ++j) out(i, j) = t(ids[i], j);
  }
  std::vector<std::uint32_t> idx(ids.begin(), ids.end());
  return make_result(std::move(out), {table.shared()}, [c, idx = std::move(idx)](Node& self) {
    Node& p = *self.parents[0];
    Matrix d(p.value.rows(), c);
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < c; ++j) d(idx[i], j) += self.grad(i, j);
    p.accumulate(d);
  });
}

Tensor dropout(const Tensor& a, double p, Rng& rng) {
  if (p < 0.0 || p >= 1.0) throw ContractError("dropout: p must be in [0, 1)");
  if (p == 0.0) return a;
  const Matrix& x = a.value();
  Matrix mask(x.rows(), x.cols());
  const double keep_scale = 1.0 / (1.0 - p);
  for (auto& m : mask.data()) m = rng.bernoulli(p) ? 0.0 : keep_scale;
  Matrix out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  return make_result(std::move(out), {a.shared()}, [mask = std::move(mask)](Node& self) {
    Matrix d = self.grad;
    for (std::size_t i = 0; i < d.size(); ++i) d[i] *= mask[i];
    self.parents[0]->accumulate(d);
  });
}

}  // namespace mtscore::ad
