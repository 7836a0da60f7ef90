// SPDX-License-Identifier: Apache-2.0

#include "molt/ad/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "molt/rng.hpp"

namespace molt::ad {

using detail::Node;

std::size_t shape_size(const Shape& s) {
  std::size_t n = 1;
  for (std::size_t d : s) n *= d;
  return n;
}

std::string shape_str(const Shape& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  out += ")";
  return out;
}

void Node::ensure_grad() {
  if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
}

namespace {

Tensor wrap(std::shared_ptr<Node> node);

std::shared_ptr<Node> make_node(Shape shape, bool requires_grad) {
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->value.assign(shape_size(n->shape), 0.0);
  n->requires_grad = requires_grad;
  return n;
}

[[noreturn]] void shape_error(const std::string& op, const Shape& a,
                              const Shape& b) {
  throw std::invalid_argument(op + ": incompatible shapes " + shape_str(a) +
                              " and " + shape_str(b));
}

// Trailing-aligned broadcast plan: per output dim, operand strides are 0
// where that operand is broadcast.
struct BcastPlan {
  Shape out;
  std::vector<std::size_t> stride_a, stride_b;
};

BcastPlan broadcast_plan(const std::string& op, const Shape& a,
                         const Shape& b) {
  const std::size_t rank = std::max(a.size(), b.size());
  BcastPlan plan;
  plan.out.resize(rank);
  std::vector<std::size_t> da(rank, 1), db(rank, 1);
  for (std::size_t i = 0; i < a.size(); ++i) da[rank - a.size() + i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) db[rank - b.size() + i] = b[i];
  for (std::size_t i = 0; i < rank; ++i) {
    if (da[i] == db[i]) {
      plan.out[i] = da[i];
    } else if (da[i] == 1) {
      plan.out[i] = db[i];
    } else if (db[i] == 1) {
      plan.out[i] = da[i];
    } else {
      shape_error(op, a, b);
    }
  }
  auto strides_for = [&](const std::vector<std::size_t>& dims) {
    std::vector<std::size_t> st(rank, 0);
    std::size_t acc = 1;
    for (std::size_t i = rank; i-- > 0;) {
      st[i] = (dims[i] == 1) ? 0 : acc;
      acc *= dims[i];
    }
    return st;
  };
  plan.stride_a = strides_for(da);
  plan.stride_b = strides_for(db);
  return plan;
}

// Walks the broadcast output space, handing (out_index, a_offset, b_offset)
// to fn. Odometer-style, no per-element index decomposition.
template <class Fn>
void for_each_bcast(const BcastPlan& plan, Fn&& fn) {
  const std::size_t rank = plan.out.size();
  const std::size_t total = shape_size(plan.out);
  if (total == 0) return;
  std::vector<std::size_t> idx(rank, 0);
  std::size_t off_a = 0, off_b = 0;
  for (std::size_t i = 0;; ++i) {
    fn(i, off_a, off_b);
    if (i + 1 == total) break;
    for (std::size_t d = rank; d-- > 0;) {
      ++idx[d];
      off_a += plan.stride_a[d];
      off_b += plan.stride_b[d];
      if (idx[d] < plan.out[d]) break;
      off_a -= plan.stride_a[d] * plan.out[d];
      off_b -= plan.stride_b[d] * plan.out[d];
      idx[d] = 0;
    }
  }
}

template <class FwdFn, class BwdFn>
Tensor elementwise_binary(const std::string& op, const Tensor& a,
                          const Tensor& b, FwdFn fwd, BwdFn bwd) {
  auto pa = a.node();
  auto pb = b.node();
  const auto plan = broadcast_plan(op, pa->shape, pb->shape);
  auto out = make_node(plan.out, pa->requires_grad || pb->requires_grad);
  const double* av = pa->value.data();
  const double* bv = pb->value.data();
  double* ov = out->value.data();
  for_each_bcast(plan, [&](std::size_t i, std::size_t ia, std::size_t ib) {
    ov[i] = fwd(av[ia], bv[ib]);
  });
  if (out->requires_grad) {
    out->parents = {pa, pb};
    out->backprop = [plan, pa, pb, bwd](Node& n) {
      const double* av = pa->value.data();
      const double* bv = pb->value.data();
      const double* g = n.grad.data();
      const bool ga = pa->requires_grad;
      const bool gb = pb->requires_grad;
      if (ga) pa->ensure_grad();
      if (gb) pb->ensure_grad();
      for_each_bcast(plan, [&](std::size_t i, std::size_t ia, std::size_t ib) {
        double da, db;
        bwd(av[ia], bv[ib], g[i], da, db);
        if (ga) pa->grad[ia] += da;
        if (gb) pb->grad[ib] += db;
      });
    };
  }
  return wrap(out);
}

template <class FwdFn, class BwdFn>
Tensor elementwise_unary(const Tensor& a, FwdFn fwd, BwdFn bwd) {
  auto pa = a.node();
  auto out = make_node(pa->shape, pa->requires_grad);
  for (std::size_t i = 0; i < pa->value.size(); ++i) {
    out->value[i] = fwd(pa->value[i]);
  }
  if (out->requires_grad) {
    out->parents = {pa};
    out->backprop = [pa, bwd](Node& n) {
      pa->ensure_grad();
      for (std::size_t i = 0; i < n.grad.size(); ++i) {
        pa->grad[i] += bwd(pa->value[i], n.value[i]) * n.grad[i];
      }
    };
  }
  return wrap(out);
}

Tensor wrap(std::shared_ptr<Node> node) { return wrap_node_(std::move(node)); }

}  // namespace

Tensor wrap_node_(std::shared_ptr<Node> node) {
  return Tensor(std::move(node));
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  return wrap_node_(make_node(std::move(shape), requires_grad));
}

Tensor Tensor::full(Shape shape, double v, bool requires_grad) {
  auto n = make_node(std::move(shape), requires_grad);
  std::fill(n->value.begin(), n->value.end(), v);
  return wrap_node_(std::move(n));
}

Tensor Tensor::from_data(Shape shape, std::vector<double> data,
                         bool requires_grad) {
  if (shape_size(shape) != data.size()) {
    throw std::invalid_argument("from_data: shape " + shape_str(shape) +
                                " does not match data length " +
                                std::to_string(data.size()));
  }
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->value = std::move(data);
  n->requires_grad = requires_grad;
  return wrap_node_(std::move(n));
}

Tensor Tensor::scalar(double v, bool requires_grad) {
  return from_data({1}, {v}, requires_grad);
}

const Shape& Tensor::shape() const { return node_->shape; }
std::size_t Tensor::size() const { return node_->value.size(); }

std::span<const double> Tensor::values() const { return node_->value; }
std::span<double> Tensor::values_mut() { return node_->value; }

double Tensor::item() const {
  if (size() != 1) {
    throw std::invalid_argument("item: tensor has shape " +
                                shape_str(shape()));
  }
  return node_->value[0];
}

bool Tensor::requires_grad() const { return node_->requires_grad; }
bool Tensor::has_grad() const {
  return node_->grad.size() == node_->value.size();
}

std::span<const double> Tensor::grad() const {
  if (!has_grad()) {
    throw std::logic_error("grad accessed before backward populated it");
  }
  return node_->grad;
}

void Tensor::zero_grad() {
  if (has_grad()) std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

Tensor add(const Tensor& a, const Tensor& b) {
  return elementwise_binary(
      "add", a, b, [](double x, double y) { return x + y; },
      [](double, double, double g, double& da, double& db) {
        da = g;
        db = g;
      });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return elementwise_binary(
      "sub", a, b, [](double x, double y) { return x - y; },
      [](double, double, double g, double& da, double& db) {
        da = g;
        db = -g;
      });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return elementwise_binary(
      "mul", a, b, [](double x, double y) { return x * y; },
      [](double x, double y, double g, double& da, double& db) {
        da = g * y;
        db = g * x;
      });
}

Tensor scale(const Tensor& a, double c) {
  return elementwise_unary(
      a, [c](double x) { return c * x; },
      [c](double, double) { return c; });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  auto pa = a.node();
  auto pb = b.node();
  if (pa->shape.size() != 2 || pb->shape.size() != 2 ||
      pa->shape[1] != pb->shape[0]) {
    shape_error("matmul", pa->shape, pb->shape);
  }
  const std::size_t m = pa->shape[0], k = pa->shape[1], n = pb->shape[1];
  auto out = make_node({m, n}, pa->requires_grad || pb->requires_grad);
  const double* av = pa->value.data();
  const double* bv = pb->value.data();
  double* ov = out->value.data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = av[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = bv + p * n;
      double* orow = ov + i * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  }
  if (out->requires_grad) {
    out->parents = {pa, pb};
    out->backprop = [pa, pb, m, k, n](Node& node) {
      const double* g = node.grad.data();
      const double* av = pa->value.data();
      const double* bv = pb->value.data();
      if (pa->requires_grad) {
        pa->ensure_grad();
        // dA = dC * B^T
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t p = 0; p < k; ++p) {
            double acc = 0.0;
            const double* grow = g + i * n;
            const double* brow = bv + p * n;
            for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
            pa->grad[i * k + p] += acc;
          }
        }
      }
      if (pb->requires_grad) {
        pb->ensure_grad();
        // dB = A^T * dC
        for (std::size_t i = 0; i < m; ++i) {
          const double* grow = g + i * n;
          for (std::size_t p = 0; p < k; ++p) {
            const double aip = av[i * k + p];
            if (aip == 0.0) continue;
            double* brow = pb->grad.data() + p * n;
            for (std::size_t j = 0; j < n; ++j) brow[j] += aip * grow[j];
          }
        }
      }
    };
  }
  return wrap(out);
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  return add(matmul(x, w), b);
}

namespace {

// axis reduction geometry: outer * axis * inner
struct AxisDims {
  std::size_t outer, axis, inner;
};

AxisDims axis_dims(const Shape& s, std::size_t axis, const char* op) {
  if (axis >= s.size()) {
    throw std::invalid_argument(std::string(op) + ": axis " +
                                std::to_string(axis) +
                                " out of range for shape " + shape_str(s));
  }
  AxisDims d{1, s[axis], 1};
  for (std::size_t i = 0; i < axis; ++i) d.outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) d.inner *= s[i];
  return d;
}

Shape drop_axis(const Shape& s, std::size_t axis) {
  Shape out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i != axis) out.push_back(s[i]);
  }
  if (out.empty()) out.push_back(1);
  return out;
}

Tensor reduce_axis(const Tensor& a, std::size_t axis, double scale_factor,
                   const char* op) {
  auto pa = a.node();
  const auto d = axis_dims(pa->shape, axis, op);
  auto out = make_node(drop_axis(pa->shape, axis), pa->requires_grad);
  const double* av = pa->value.data();
  double* ov = out->value.data();
  for (std::size_t o = 0; o < d.outer; ++o) {
    for (std::size_t m = 0; m < d.axis; ++m) {
      const double* row = av + (o * d.axis + m) * d.inner;
      double* orow = ov + o * d.inner;
      for (std::size_t i = 0; i < d.inner; ++i) orow[i] += row[i];
    }
  }
  if (scale_factor != 1.0) {
    for (auto& v : out->value) v *= scale_factor;
  }
  if (out->requires_grad) {
    out->parents = {pa};
    out->backprop = [pa, d, scale_factor](Node& n) {
      pa->ensure_grad();
      const double* g = n.grad.data();
      for (std::size_t o = 0; o < d.outer; ++o) {
        const double* grow = g + o * d.inner;
        for (std::size_t m = 0; m < d.axis; ++m) {
          double* row = pa->grad.data() + (o * d.axis + m) * d.inner;
          for (std::size_t i = 0; i < d.inner; ++i) {
            row[i] += scale_factor * grow[i];
          }
        }
      }
    };
  }
  return wrap(out);
}

}  // namespace

Tensor sum(const Tensor& a, std::size_t axis) {
  return reduce_axis(a, axis, 1.0, "sum");
}

Tensor mean(const Tensor& a, std::size_t axis) {
  const auto d = axis_dims(a.shape(), axis, "mean");
  if (d.axis == 0) {
    throw std::invalid_argument("mean: empty axis");
  }
  return reduce_axis(a, axis, 1.0 / static_cast<double>(d.axis), "mean");
}

Tensor sum_all(const Tensor& a) {
  auto flat = reshape(a, {a.size()});
  return sum(flat, 0);
}

Tensor mean_all(const Tensor& a) {
  auto flat = reshape(a, {a.size()});
  return mean(flat, 0);
}

Tensor concat(const std::vector<Tensor>& parts, std::size_t axis) {
  if (parts.empty()) throw std::invalid_argument("concat: no inputs");
  const Shape& ref = parts[0].shape();
  if (axis >= ref.size()) {
    throw std::invalid_argument("concat: axis " + std::to_string(axis) +
                                " out of range for shape " + shape_str(ref));
  }
  Shape out_shape = ref;
  out_shape[axis] = 0;
  bool needs_grad = false;
  for (const auto& t : parts) {
    const Shape& s = t.shape();
    if (s.size() != ref.size()) shape_error("concat", ref, s);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i != axis && s[i] != ref[i]) shape_error("concat", ref, s);
    }
    out_shape[axis] += s[axis];
    needs_grad = needs_grad || t.requires_grad();
  }

  auto out = make_node(out_shape, needs_grad);
  const auto od = axis_dims(out_shape, axis, "concat");
  std::size_t axis_offset = 0;
  std::vector<std::shared_ptr<Node>> srcs;
  std::vector<std::size_t> offsets;
  for (const auto& t : parts) {
    auto p = t.node();
    const std::size_t alen = p->shape[axis];
    for (std::size_t o = 0; o < od.outer; ++o) {
      const double* src = p->value.data() + o * alen * od.inner;
      double* dst =
          out->value.data() + (o * od.axis + axis_offset) * od.inner;
      std::copy(src, src + alen * od.inner, dst);
    }
    srcs.push_back(p);
    offsets.push_back(axis_offset);
    axis_offset += alen;
  }

  if (needs_grad) {
    out->parents = srcs;
    out->backprop = [srcs, offsets, od](Node& n) {
      for (std::size_t t = 0; t < srcs.size(); ++t) {
        auto& p = srcs[t];
        if (!p->requires_grad) continue;
        p->ensure_grad();
        const std::size_t alen = p->value.size() / (od.outer * od.inner);
        for (std::size_t o = 0; o < od.outer; ++o) {
          const double* g =
              n.grad.data() + (o * od.axis + offsets[t]) * od.inner;
          double* dst = p->grad.data() + o * alen * od.inner;
          for (std::size_t i = 0; i < alen * od.inner; ++i) dst[i] += g[i];
        }
      }
    };
  }
  return wrap(out);
}

Tensor slice_last(const Tensor& a, std::size_t start, std::size_t len) {
  auto pa = a.node();
  const Shape& s = pa->shape;
  if (s.empty() || start + len > s.back()) {
    throw std::invalid_argument("slice_last: range [" + std::to_string(start) +
                                "," + std::to_string(start + len) +
                                ") out of bounds for shape " + shape_str(s));
  }
  Shape out_shape = s;
  out_shape.back() = len;
  auto out = make_node(out_shape, pa->requires_grad);
  const std::size_t width = s.back();
  const std::size_t rows = pa->value.size() / width;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* src = pa->value.data() + r * width + start;
    std::copy(src, src + len, out->value.data() + r * len);
  }
  if (out->requires_grad) {
    out->parents = {pa};
    out->backprop = [pa, start, len, width, rows](Node& n) {
      pa->ensure_grad();
      for (std::size_t r = 0; r < rows; ++r) {
        const double* g = n.grad.data() + r * len;
        double* dst = pa->grad.data() + r * width + start;
        for (std::size_t i = 0; i < len; ++i) dst[i] += g[i];
      }
    };
  }
  return wrap(out);
}

Tensor reshape(const Tensor& a, Shape shape) {
  auto pa = a.node();
  if (shape_size(shape) != pa->value.size()) {
    shape_error("reshape", pa->shape, shape);
  }
  auto out = make_node(shape, pa->requires_grad);
  out->value = pa->value;
  if (out->requires_grad) {
    out->parents = {pa};
    out->backprop = [pa](Node& n) {
      pa->ensure_grad();
      for (std::size_t i = 0; i < n.grad.size(); ++i) {
        pa->grad[i] += n.grad[i];
      }
    };
  }
  return wrap(out);
}

Tensor gather_rows(const Tensor& a, std::vector<std::size_t> indices) {
  auto pa = a.node();
  if (pa->shape.empty()) {
    throw std::invalid_argument("gather_rows: scalar input");
  }
  const std::size_t rows = pa->shape[0];
  const std::size_t inner = pa->value.size() / std::max<std::size_t>(rows, 1);
  for (std::size_t idx : indices) {
    if (idx >= rows) {
      throw std::invalid_argument("gather_rows: index " + std::to_string(idx) +
                                  " out of range for " + std::to_string(rows) +
                                  " rows");
    }
  }
  Shape out_shape = pa->shape;
  out_shape[0] = indices.size();
  auto out = make_node(out_shape, pa->requires_grad);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const double* src = pa->value.data() + indices[i] * inner;
    std::copy(src, src + inner, out->value.data() + i * inner);
  }
  if (out->requires_grad) {
    out->parents = {pa};
    auto idx = std::make_shared<std::vector<std::size_t>>(std::move(indices));
    out->backprop = [pa, idx, inner](Node& n) {
      pa->ensure_grad();
      for (std::size_t i = 0; i < idx->size(); ++i) {
        const double* g = n.grad.data() + i * inner;
        double* dst = pa->grad.data() + (*idx)[i] * inner;
        for (std::size_t j = 0; j < inner; ++j) dst[j] += g[j];
      }
    };
  }
  return wrap(out);
}

Tensor scatter_add_rows(const Tensor& a, std::vector<std::size_t> indices,
                        std::size_t out_rows) {
  auto pa = a.node();
  if (pa->shape.empty() || pa->shape[0] != indices.size()) {
    throw std::invalid_argument(
        "scatter_add_rows: " + std::to_string(indices.size()) +
        " indices for input shape " + shape_str(pa->shape));
  }
  const std::size_t inner =
      pa->value.size() / std::max<std::size_t>(pa->shape[0], 1);
  for (std::size_t idx : indices) {
    if (idx >= out_rows) {
      throw std::invalid_argument("scatter_add_rows: index " +
                                  std::to_string(idx) + " out of range for " +
                                  std::to_string(out_rows) + " rows");
    }
  }
  Shape out_shape = pa->shape;
  out_shape[0] = out_rows;
  auto out = make_node(out_shape, pa->requires_grad);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const double* src = pa->value.data() + i * inner;
    double* dst = out->value.data() + indices[i] * inner;
    for (std::size_t j = 0; j < inner; ++j) dst[j] += src[j];
  }
  if (out->requires_grad) {
    out->parents = {pa};
    auto idx = std::make_shared<std::vector<std::size_t>>(std::move(indices));
    out->backprop = [pa, idx, inner](Node& n) {
      pa->ensure_grad();
      for (std::size_t i = 0; i < idx->size(); ++i) {
        const double* g = n.grad.data() + (*idx)[i] * inner;
        double* dst = pa->grad.data() + i * inner;
        for (std::size_t j = 0; j < inner; ++j) dst[j] += g[j];
      }
    };
  }
  return wrap(out);
}

Tensor l2_norm(const Tensor& a, std::size_t axis, double eps) {
  auto pa = a.node();
  const auto d = axis_dims(pa->shape, axis, "l2_norm");
  auto out = make_node(drop_axis(pa->shape, axis), pa->requires_grad);
  const double* av = pa->value.data();
  for (std::size_t o = 0; o < d.outer; ++o) {
    for (std::size_t i = 0; i < d.inner; ++i) {
      double acc = eps;
      for (std::size_t m = 0; m < d.axis; ++m) {
        const double v = av[(o * d.axis + m) * d.inner + i];
        acc += v * v;
      }
      out->value[o * d.inner + i] = std::sqrt(acc);
    }
  }
  if (out->requires_grad) {
    out->parents = {pa};
    out->backprop = [pa, d](Node& n) {
      pa->ensure_grad();
      const double* av = pa->value.data();
      for (std::size_t o = 0; o < d.outer; ++o) {
        for (std::size_t i = 0; i < d.inner; ++i) {
          const std::size_t oi = o * d.inner + i;
          const double inv = n.grad[oi] / n.value[oi];
          for (std::size_t m = 0; m < d.axis; ++m) {
            const std::size_t ai = (o * d.axis + m) * d.inner + i;
            pa->grad[ai] += av[ai] * inv;
          }
        }
      }
    };
  }
  return wrap(out);
}

Tensor dot(const Tensor& a, const Tensor& b, std::size_t axis) {
  if (a.shape() != b.shape()) {
    shape_error("dot", a.shape(), b.shape());
  }
  return sum(mul(a, b), axis);
}

Tensor sigmoid(const Tensor& a) {
  return elementwise_unary(
      a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor swish(const Tensor& a) {
  return elementwise_unary(
      a,
      [](double x) { return x / (1.0 + std::exp(-x)); },
      [](double x, double) {
        const double s = 1.0 / (1.0 + std::exp(-x));
        return s * (1.0 + x * (1.0 - s));
      });
}

Tensor dropout(const Tensor& a, double p, bool train, std::uint64_t key) {
  if (p < 0.0 || p >= 1.0) {
    throw std::invalid_argument("dropout: p=" + std::to_string(p) +
                                " outside [0, 1)");
  }
  if (!train || p == 0.0) return a;
  auto pa = a.node();
  auto out = make_node(pa->shape, pa->requires_grad);
  auto mask = std::make_shared<std::vector<double>>(pa->value.size());
  const double keep_scale = 1.0 / (1.0 - p);
  for (std::size_t i = 0; i < pa->value.size(); ++i) {
    (*mask)[i] = (SplitRng::uniform_at(key, i) >= p) ? keep_scale : 0.0;
    out->value[i] = pa->value[i] * (*mask)[i];
  }
  if (out->requires_grad) {
    out->parents = {pa};
    out->backprop = [pa, mask](Node& n) {
      pa->ensure_grad();
      for (std::size_t i = 0; i < n.grad.size(); ++i) {
        pa->grad[i] += n.grad[i] * (*mask)[i];
      }
    };
  }
  return wrap(out);
}

Tensor batch_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  std::vector<double>& running_mean,
                  std::vector<double>& running_var, bool train,
                  double momentum, double eps) {
  auto px = x.node();
  auto pg = gamma.node();
  auto pb = beta.node();
  if (px->shape.size() != 2) {
    throw std::invalid_argument("batch_norm: expected (batch, features), got " +
                                shape_str(px->shape));
  }
  const std::size_t batch = px->shape[0];
  const std::size_t feat = px->shape[1];
  if (pg->value.size() != feat || pb->value.size() != feat ||
      running_mean.size() != feat || running_var.size() != feat) {
    throw std::invalid_argument("batch_norm: parameter length mismatch for " +
                                std::to_string(feat) + " features");
  }
  if (batch == 0) throw std::invalid_argument("batch_norm: empty batch");

  auto out = make_node(px->shape, px->requires_grad || pg->requires_grad ||
                                      pb->requires_grad);
  // saved0 = xhat, saved1 = 1/sqrt(var + eps) per feature
  out->saved0.resize(px->value.size());
  out->saved1.resize(feat);

  std::vector<double> mu(feat, 0.0), var(feat, 0.0);
  if (train) {
    for (std::size_t i = 0; i < batch; ++i) {
      for (std::size_t f = 0; f < feat; ++f) mu[f] += px->value[i * feat + f];
    }
    for (std::size_t f = 0; f < feat; ++f) mu[f] /= static_cast<double>(batch);
    for (std::size_t i = 0; i < batch; ++i) {
      for (std::size_t f = 0; f < feat; ++f) {
        const double d = px->value[i * feat + f] - mu[f];
        var[f] += d * d;
      }
    }
    for (std::size_t f = 0; f < feat; ++f) var[f] /= static_cast<double>(batch);
    // Running update: biased batch variance is used for normalization,
    // the unbiased estimate feeds the running buffer.
    const double unbias =
        batch > 1 ? static_cast<double>(batch) / static_cast<double>(batch - 1)
                  : 1.0;
    for (std::size_t f = 0; f < feat; ++f) {
      running_mean[f] = (1.0 - momentum) * running_mean[f] + momentum * mu[f];
      running_var[f] =
          (1.0 - momentum) * running_var[f] + momentum * var[f] * unbias;
    }
  } else {
    mu = running_mean;
    var = running_var;
  }

  for (std::size_t f = 0; f < feat; ++f) {
    out->saved1[f] = 1.0 / std::sqrt(var[f] + eps);
  }
  for (std::size_t i = 0; i < batch; ++i) {
    for (std::size_t f = 0; f < feat; ++f) {
      const std::size_t k = i * feat + f;
      const double xhat = (px->value[k] - mu[f]) * out->saved1[f];
      out->saved0[k] = xhat;
      out->value[k] = pg->value[f] * xhat + pb->value[f];
    }
  }

  if (out->requires_grad) {
    out->parents = {px, pg, pb};
    out->backprop = [px, pg, pb, batch, feat, train](Node& n) {
      const double* g = n.grad.data();
      const double* xhat = n.saved0.data();
      const double* inv_std = n.saved1.data();
      if (pg->requires_grad) {
        pg->ensure_grad();
        for (std::size_t i = 0; i < batch; ++i) {
          for (std::size_t f = 0; f < feat; ++f) {
            pg->grad[f] += g[i * feat + f] * xhat[i * feat + f];
          }
        }
      }
      if (pb->requires_grad) {
        pb->ensure_grad();
        for (std::size_t i = 0; i < batch; ++i) {
          for (std::size_t f = 0; f < feat; ++f) {
            pb->grad[f] += g[i * feat + f];
          }
        }
      }
      if (!px->requires_grad) return;
      px->ensure_grad();
      if (!train) {
        for (std::size_t i = 0; i < batch; ++i) {
          for (std::size_t f = 0; f < feat; ++f) {
            px->grad[i * feat + f] +=
                g[i * feat + f] * pg->value[f] * inv_std[f];
          }
        }
        return;
      }
      // Train mode: gradient flows through the batch statistics.
      const double inv_b = 1.0 / static_cast<double>(batch);
      for (std::size_t f = 0; f < feat; ++f) {
        double sum_gy = 0.0, sum_gy_xhat = 0.0;
        for (std::size_t i = 0; i < batch; ++i) {
          const double gy = g[i * feat + f] * pg->value[f];
          sum_gy += gy;
          sum_gy_xhat += gy * xhat[i * feat + f];
        }
        for (std::size_t i = 0; i < batch; ++i) {
          const std::size_t k = i * feat + f;
          const double gy = g[k] * pg->value[f];
          px->grad[k] += inv_std[f] * (gy - inv_b * sum_gy -
                                       inv_b * xhat[k] * sum_gy_xhat);
        }
      }
    };
  }
  return wrap(out);
}

void backward(const Tensor& loss) {
  auto root = loss.node();
  if (!root) throw std::invalid_argument("backward: undefined tensor");
  if (root->value.size() != 1) {
    throw std::invalid_argument("backward: loss must be scalar, got shape " +
                                shape_str(root->shape));
  }
  if (!root->requires_grad) return;

  // Iterative post-order DFS over grad-requiring parents.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(root.get(), 0);
  visited.insert(root.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    bool descended = false;
    while (next < node->parents.size()) {
      Node* p = node->parents[next++].get();
      if (p->requires_grad && visited.insert(p).second) {
        stack.emplace_back(p, 0);
        descended = true;
        break;
      }
    }
    if (!descended && (stack.back().second >= stack.back().first->parents.size())) {
      order.push_back(stack.back().first);
      stack.pop_back();
    }
  }

  root->ensure_grad();
  root->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backprop) {
      n->ensure_grad();
      n->backprop(*n);
    }
  }
}

}  // namespace molt::ad
