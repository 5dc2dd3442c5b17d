#include "codescope/numcore/ops.hpp"

#include <cmath>

namespace codescope::nc {

namespace {

void push(const std::shared_ptr<Node>& parent, const Tensor& g) {
  if (parent->requires_grad) parent->accumulate(g);
}

void require_same_shape(const Var& a, const Var& b, const char* op) {
  if (!a.value().same_shape(b.value()))
    throw DimensionError(std::string(op) + ": shape mismatch " +
                         a.value().shape_str() + " vs " + b.value().shape_str());
}

}  // namespace

Var add(const Var& a, const Var& b) {
  require_same_shape(a, b, "add");
  Tensor out = a.value();
  for (int64_t i = 0; i < out.numel(); ++i) out[i] += b.value()[i];
  auto pa = a.node(), pb = b.node();
  return make_op(std::move(out), "add", {a, b}, [pa, pb](Node& n) {
    push(pa, n.grad);
    push(pb, n.grad);
  });
}

Var sub(const Var& a, const Var& b) {
  require_same_shape(a, b, "sub");
  Tensor out = a.value();
  for (int64_t i = 0; i < out.numel(); ++i) out[i] -= b.value()[i];
  auto pa = a.node(), pb = b.node();
  return make_op(std::move(out), "sub", {a, b}, [pa, pb](Node& n) {
    push(pa, n.grad);
    if (pb->requires_grad) {
      Tensor g = n.grad;
      for (int64_t i = 0; i < g.numel(); ++i) g[i] = -g[i];
      pb->accumulate(g);
    }
  });
}

Var mul(const Var& a, const Var& b) {
  require_same_shape(a, b, "mul");
  Tensor out = a.value();
  for (int64_t i = 0; i < out.numel(); ++i) out[i] *= b.value()[i];
  auto pa = a.node(), pb = b.node();
  return make_op(std::move(out), "mul", {a, b}, [pa, pb](Node& n) {
    if (pa->requires_grad) {
      Tensor g = n.grad;
      for (int64_t i = 0; i < g.numel(); ++i) g[i] *= pb->value[i];
      pa->accumulate(g);
    }
    if (pb->requires_grad) {
      Tensor g = n.grad;
      for (int64_t i = 0; i < g.numel(); ++i) g[i] *= pa->value[i];
      pb->accumulate(g);
    }
  });
}

Var scale(const Var& a, double c) {
  Tensor out = a.value();
  for (int64_t i = 0; i < out.numel(); ++i) out[i] *= c;
  auto pa = a.node();
  return make_op(std::move(out), "scale", {a}, [pa, c](Node& n) {
    Tensor g = n.grad;
    for (int64_t i = 0; i < g.numel(); ++i) g[i] *= c;
    push(pa, g);
  });
}

Var abs(const Var& a) {
  Tensor out = a.value();
  for (int64_t i = 0; i < out.numel(); ++i) out[i] = std::fabs(out[i]);
  auto pa = a.node();
  return make_op(std::move(out), "abs", {a}, [pa](Node& n) {
    Tensor g = n.grad;
    for (int64_t i = 0; i < g.numel(); ++i)
      g[i] *= (pa->value[i] >= 0.0 ? 1.0 : -1.0);
    push(pa, g);
  });
}

Var sigmoid(const Var& a) {
  Tensor out = a.value();
  for (int64_t i = 0; i < out.numel(); ++i) out[i] = 1.0 / (1.0 + std::exp(-out[i]));
  Tensor saved = out;
  auto pa = a.node();
  return make_op(std::move(out), "sigmoid", {a}, [pa, saved](Node& n) {
    Tensor g = n.grad;
    for (int64_t i = 0; i < g.numel(); ++i) g[i] *= saved[i] * (1.0 - saved[i]);
    push(pa, g);
  });
}

Var gelu(const Var& a) {
  // tanh approximation; smooth enough for finite-difference checks
  constexpr double k = 0.7978845608028654;  // sqrt(2/pi)
  Tensor out = a.value();
  for (int64_t i = 0; i < out.numel(); ++i) {
    double x = out[i];
    out[i] = 0.5 * x * (1.0 + std::tanh(k * (x + 0.044715 * x * x * x)));
  }
  auto pa = a.node();
  return make_op(std::move(out), "gelu", {a}, [pa](Node& n) {
    Tensor g = n.grad;
    for (int64_t i = 0; i < g.numel(); ++i) {
      double x = pa->value[i];
      double u = k * (x + 0.044715 * x * x * x);
      double t = std::tanh(u);
      double du = k * (1.0 + 3.0 * 0.044715 * x * x);
      g[i] *= 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du;
    }
    push(pa, g);
  });
}

Var square(const Var& a) { return mul(a, a); }

Var exp(const Var& a) {
  Tensor out = a.value();
  for (int64_t i = 0; i < out.numel(); ++i) out[i] = std::exp(out[i]);
  Tensor saved = out;
  auto pa = a.node();
  return make_op(std::move(out), "exp", {a}, [pa, saved](Node& n) {
    Tensor g = n.grad;
    for (int64_t i = 0; i < g.numel(); ++i) g[i] *= saved[i];
    push(pa, g);
  });
}

Var log(const Var& a) {
  Tensor out = a.value();
  for (int64_t i = 0; i < out.numel(); ++i) out[i] = std::log(out[i]);
  auto pa = a.node();
  return make_op(std::move(out), "log", {a}, [pa](Node& n) {
    Tensor g = n.grad;
    for (int64_t i = 0; i < g.numel(); ++i) g[i] /= pa->value[i];
    push(pa, g);
  });
}

Var add_rowvec(const Var& m, const Var& b) {
  int64_t R = m.value().rows(), C = m.value().cols();
  if (b.value().rank() != 1 || b.value().dim(0) != C)
    throw DimensionError("add_rowvec: bias shape " + b.value().shape_str());
  Tensor out = m.value();
  for (int64_t r = 0; r < R; ++r)
    for (int64_t c = 0; c < C; ++c) out.at(r, c) += b.value()[c];
  auto pm = m.node(), pb = b.node();
  return make_op(std::move(out), "add_rowvec", {m, b}, [pm, pb, R, C](Node& n) {
    push(pm, n.grad);
    if (pb->requires_grad) {
      Tensor g({C});
      for (int64_t r = 0; r < R; ++r)
        for (int64_t c = 0; c < C; ++c) g[c] += n.grad.at(r, c);
      pb->accumulate(g);
    }
  });
}

Var mul_scalar(const Var& s, const Var& t) {
  if (s.value().numel() != 1)
    throw DimensionError("mul_scalar: scalar operand has shape " + s.value().shape_str());
  double sv = s.value()[0];
  Tensor out = t.value();
  for (int64_t i = 0; i < out.numel(); ++i) out[i] *= sv;
  auto ps = s.node(), pt = t.node();
  return make_op(std::move(out), "mul_scalar", {s, t}, [ps, pt, sv](Node& n) {
    if (ps->requires_grad) {
      double acc = 0.0;
      for (int64_t i = 0; i < n.grad.numel(); ++i) acc += n.grad[i] * pt->value[i];
      Tensor g(ps->value.shape());
      g[0] = acc;
      ps->accumulate(g);
    }
    if (pt->requires_grad) {
      Tensor g = n.grad;
      for (int64_t i = 0; i < g.numel(); ++i) g[i] *= sv;
      pt->accumulate(g);
    }
  });
}

Var matmul(const Var& a, const Var& b) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (A.rank() != 2 || B.rank() != 2 || A.cols() != B.rows())
    throw DimensionError("matmul: incompatible shapes " + A.shape_str() + " x " +
                         B.shape_str());
  int64_t M = A.rows(), K = A.cols(), N = B.cols();
  Tensor out({M, N});
  for (int64_t i = 0; i < M; ++i) {
    const double* arow = A.data() + i * K;
    double* orow = out.data() + i * N;
    for (int64_t k = 0; k < K; ++k) {
      double av = arow[k];
      const double* brow = B.data() + k * N;
      for (int64_t j = 0; j < N; ++j) orow[j] += av * brow[j];
    }
  }
  auto pa = a.node(), pb = b.node();
  return make_op(std::move(out), "matmul", {a, b}, [pa, pb, M, K, N](Node& n) {
    const double* dC = n.grad.data();
    if (pa->requires_grad) {
      // dA[i,k] = <dC row i, B row k> (both contiguous)
      Tensor g({M, K});
      const double* B = pb->value.data();
      double* G = g.data();
      for (int64_t i = 0; i < M; ++i) {
        const double* drow = dC + i * N;
        double* grow = G + i * K;
        for (int64_t k = 0; k < K; ++k) {
          const double* brow = B + k * N;
          double s = 0.0;
          for (int64_t j = 0; j < N; ++j) s += drow[j] * brow[j];
          grow[k] = s;
        }
      }
      pa->accumulate(g);
    }
    if (pb->requires_grad) {
      // dB = A^T * dC, accumulated row-contiguously
      Tensor g({K, N});
      const double* A = pa->value.data();
      double* G = g.data();
      for (int64_t i = 0; i < M; ++i) {
        const double* arow = A + i * K;
        const double* drow = dC + i * N;
        for (int64_t k = 0; k < K; ++k) {
          double av = arow[k];
          double* grow = G + k * N;
          for (int64_t j = 0; j < N; ++j) grow[j] += av * drow[j];
        }
      }
      pb->accumulate(g);
    }
  });
}

Var transpose(const Var& a) {
  const Tensor& A = a.value();
  int64_t R = A.rows(), C = A.cols();
  Tensor out({C, R});
  for (int64_t r = 0; r < R; ++r)
    for (int64_t c = 0; c < C; ++c) out.at(c, r) = A.at(r, c);
  auto pa = a.node();
  return make_op(std::move(out), "transpose", {a}, [pa, R, C](Node& n) {
    if (!pa->requires_grad) return;
    Tensor g({R, C});
    for (int64_t r = 0; r < R; ++r)
      for (int64_t c = 0; c < C; ++c) g.at(r, c) = n.grad.at(c, r);
    pa->accumulate(g);
  });
}

Var dot(const Var& u, const Var& v) {
  require_same_shape(u, v, "dot");
  double acc = 0.0;
  for (int64_t i = 0; i < u.value().numel(); ++i) acc += u.value()[i] * v.value()[i];
  auto pu = u.node(), pv = v.node();
  return make_op(Tensor::scalar(acc), "dot", {u, v}, [pu, pv](Node& n) {
    double g = n.grad[0];
    if (pu->requires_grad) {
      Tensor gu(pu->value.shape());
      for (int64_t i = 0; i < gu.numel(); ++i) gu[i] = g * pv->value[i];
      pu->accumulate(gu);
    }
    if (pv->requires_grad) {
      Tensor gv(pv->value.shape());
      for (int64_t i = 0; i < gv.numel(); ++i) gv[i] = g * pu->value[i];
      pv->accumulate(gv);
    }
  });
}

namespace {
double vec_norm(const Tensor& t) {
  double s = 0.0;
  for (int64_t i = 0; i < t.numel(); ++i) s += t[i] * t[i];
  return std::sqrt(s);
}
}  // namespace

Var cosine_similarity(const Var& u, const Var& v) {
  require_same_shape(u, v, "cosine_similarity");
  double nu = vec_norm(u.value()), nv = vec_norm(v.value());
  if (nu == 0.0 || nv == 0.0)
    throw NumericError("cosine_similarity: zero-norm vector");
  double d = 0.0;
  for (int64_t i = 0; i < u.value().numel(); ++i) d += u.value()[i] * v.value()[i];
  double cosv = d / (nu * nv);
  auto pu = u.node(), pv = v.node();
  return make_op(Tensor::scalar(cosv), "cosine_similarity", {u, v},
                 [pu, pv, nu, nv, cosv](Node& n) {
                   double g = n.grad[0];
                   if (pu->requires_grad) {
                     Tensor gu(pu->value.shape());
                     for (int64_t i = 0; i < gu.numel(); ++i)
                       gu[i] = g * (pv->value[i] / (nu * nv) -
                                    cosv * pu->value[i] / (nu * nu));
                     pu->accumulate(gu);
                   }
                   if (pv->requires_grad) {
                     Tensor gv(pv->value.shape());
                     for (int64_t i = 0; i < gv.numel(); ++i)
                       gv[i] = g * (pu->value[i] / (nu * nv) -
                                    cosv * pv->value[i] / (nv * nv));
                     pv->accumulate(gv);
                   }
                 });
}

double cosine_similarity(const Tensor& u, const Tensor& v) {
  if (!u.same_shape(v)) throw DimensionError("cosine_similarity: shape mismatch");
  double nu = vec_norm(u), nv = vec_norm(v);
  if (nu == 0.0 || nv == 0.0)
    throw NumericError("cosine_similarity: zero-norm vector");
  double d = 0.0;
  for (int64_t i = 0; i < u.numel(); ++i) d += u[i] * v[i];
  return d / (nu * nv);
}

Var sum(const Var& a) {
  double acc = 0.0;
  for (int64_t i = 0; i < a.value().numel(); ++i) acc += a.value()[i];
  auto pa = a.node();
  return make_op(Tensor::scalar(acc), "sum", {a}, [pa](Node& n) {
    if (!pa->requires_grad) return;
    pa->accumulate(Tensor::full(pa->value.shape(), n.grad[0]));
  });
}

Var mean_rows(const Var& m) {
  int64_t R = m.value().rows(), C = m.value().cols();
  if (R == 0) throw DimensionError("mean_rows: empty matrix");
  Tensor out({C});
  for (int64_t r = 0; r < R; ++r)
    for (int64_t c = 0; c < C; ++c) out[c] += m.value().at(r, c);
  for (int64_t c = 0; c < C; ++c) out[c] /= static_cast<double>(R);
  auto pm = m.node();
  return make_op(std::move(out), "mean_rows", {m}, [pm, R, C](Node& n) {
    if (!pm->requires_grad) return;
    Tensor g({R, C});
    for (int64_t r = 0; r < R; ++r)
      for (int64_t c = 0; c < C; ++c) g.at(r, c) = n.grad[c] / static_cast<double>(R);
    pm->accumulate(g);
  });
}

Var row(const Var& m, int64_t i) {
  int64_t R = m.value().rows(), C = m.value().cols();
  if (i < 0 || i >= R) throw DimensionError("row: index out of range");
  Tensor out({C});
  for (int64_t c = 0; c < C; ++c) out[c] = m.value().at(i, c);
  auto pm = m.node();
  return make_op(std::move(out), "row", {m}, [pm, i, R, C](Node& n) {
    if (!pm->requires_grad) return;
    Tensor g({R, C});
    for (int64_t c = 0; c < C; ++c) g.at(i, c) = n.grad[c];
    pm->accumulate(g);
  });
}

Var stack_rows(const std::vector<Var>& rows) {
  if (rows.empty()) throw DimensionError("stack_rows: empty input");
  int64_t C = rows[0].value().numel();
  int64_t R = static_cast<int64_t>(rows.size());
  Tensor out({R, C});
  for (int64_t r = 0; r < R; ++r) {
    if (rows[static_cast<size_t>(r)].value().numel() != C)
      throw DimensionError("stack_rows: ragged rows");
    for (int64_t c = 0; c < C; ++c)
      out.at(r, c) = rows[static_cast<size_t>(r)].value()[c];
  }
  std::vector<std::shared_ptr<Node>> ps;
  for (const auto& v : rows) ps.push_back(v.node());
  return make_op(std::move(out), "stack_rows", rows, [ps, C](Node& n) {
    for (size_t r = 0; r < ps.size(); ++r) {
      if (!ps[r]->requires_grad) continue;
      Tensor g(ps[r]->value.shape());
      for (int64_t c = 0; c < C; ++c)
        g[c] = n.grad.at(static_cast<int64_t>(r), c);
      ps[r]->accumulate(g);
    }
  });
}

Var concat(const std::vector<Var>& vecs) {
  int64_t total = 0;
  for (const auto& v : vecs) total += v.value().numel();
  Tensor out({total});
  int64_t off = 0;
  for (const auto& v : vecs) {
    for (int64_t i = 0; i < v.value().numel(); ++i) out[off + i] = v.value()[i];
    off += v.value().numel();
  }
  std::vector<std::shared_ptr<Node>> ps;
  for (const auto& v : vecs) ps.push_back(v.node());
  return make_op(std::move(out), "concat", vecs, [ps](Node& n) {
    int64_t off = 0;
    for (const auto& p : ps) {
      int64_t len = p->value.numel();
      if (p->requires_grad) {
        Tensor g(p->value.shape());
        for (int64_t i = 0; i < len; ++i) g[i] = n.grad[off + i];
        p->accumulate(g);
      }
      off += len;
    }
  });
}

Var slice_cols(const Var& m, int64_t c0, int64_t c1) {
  int64_t R = m.value().rows(), C = m.value().cols();
  if (c0 < 0 || c1 > C || c0 >= c1) throw DimensionError("slice_cols: bad range");
  int64_t W = c1 - c0;
  Tensor out({R, W});
  for (int64_t r = 0; r < R; ++r)
    for (int64_t c = 0; c < W; ++c) out.at(r, c) = m.value().at(r, c0 + c);
  auto pm = m.node();
  return make_op(std::move(out), "slice_cols", {m}, [pm, R, C, c0, W](Node& n) {
    if (!pm->requires_grad) return;
    Tensor g({R, C});
    for (int64_t r = 0; r < R; ++r)
      for (int64_t c = 0; c < W; ++c) g.at(r, c0 + c) = n.grad.at(r, c);
    pm->accumulate(g);
  });
}

Var concat_cols(const std::vector<Var>& mats) {
  if (mats.empty()) throw DimensionError("concat_cols: empty input");
  int64_t R = mats[0].value().rows();
  int64_t total = 0;
  for (const auto& m : mats) {
    if (m.value().rows() != R) throw DimensionError("concat_cols: row mismatch");
    total += m.value().cols();
  }
  Tensor out({R, total});
  int64_t off = 0;
  for (const auto& m : mats) {
    int64_t C = m.value().cols();
    for (int64_t r = 0; r < R; ++r)
      for (int64_t c = 0; c < C; ++c) out.at(r, off + c) = m.value().at(r, c);
    off += C;
  }
  std::vector<std::shared_ptr<Node>> ps;
  for (const auto& m : mats) ps.push_back(m.node());
  return make_op(std::move(out), "concat_cols", mats, [ps, R](Node& n) {
    int64_t off = 0;
    for (const auto& p : ps) {
      int64_t C = p->value.cols();
      if (p->requires_grad) {
        Tensor g({R, C});
        for (int64_t r = 0; r < R; ++r)
          for (int64_t c = 0; c < C; ++c) g.at(r, c) = n.grad.at(r, off + c);
        p->accumulate(g);
      }
      off += C;
    }
  });
}

Var add_many(const std::vector<Var>& terms) {
  if (terms.empty()) throw DimensionError("add_many: empty input");
  Var acc = terms[0];
  for (size_t i = 1; i < terms.size(); ++i) acc = add(acc, terms[i]);
  return acc;
}

Var softmax(const Var& x, int axis) {
  const Tensor& X = x.value();
  if (X.rank() == 1) {
    int64_t C = X.numel();
    double mx = X[0];
    for (int64_t i = 1; i < C; ++i) mx = std::max(mx, X[i]);
    Tensor out({C});
    double z = 0.0;
    for (int64_t i = 0; i < C; ++i) {
      out[i] = std::exp(X[i] - mx);
      z += out[i];
    }
    for (int64_t i = 0; i < C; ++i) out[i] /= z;
    Tensor saved = out;
    auto px = x.node();
    return make_op(std::move(out), "softmax", {x}, [px, saved, C](Node& n) {
      if (!px->requires_grad) return;
      double inner = 0.0;
      for (int64_t i = 0; i < C; ++i) inner += n.grad[i] * saved[i];
      Tensor g({C});
      for (int64_t i = 0; i < C; ++i) g[i] = saved[i] * (n.grad[i] - inner);
      px->accumulate(g);
    });
  }
  if (X.rank() != 2) throw DimensionError("softmax: rank must be 1 or 2");
  int64_t R = X.rows(), C = X.cols();
  int ax = axis < 0 ? 1 : axis;
  if (ax != 1) throw DimensionError("softmax: only row-wise (axis=1) supported for matrices");
  Tensor out({R, C});
  for (int64_t r = 0; r < R; ++r) {
    double mx = X.at(r, 0);
    for (int64_t c = 1; c < C; ++c) mx = std::max(mx, X.at(r, c));
    double z = 0.0;
    for (int64_t c = 0; c < C; ++c) {
      double e = std::exp(X.at(r, c) - mx);
      out.at(r, c) = e;
      z += e;
    }
    for (int64_t c = 0; c < C; ++c) out.at(r, c) /= z;
  }
  Tensor saved = out;
  auto px = x.node();
  return make_op(std::move(out), "softmax", {x}, [px, saved, R, C](Node& n) {
    if (!px->requires_grad) return;
    Tensor g({R, C});
    for (int64_t r = 0; r < R; ++r) {
      double inner = 0.0;
      for (int64_t c = 0; c < C; ++c) inner += n.grad.at(r, c) * saved.at(r, c);
      for (int64_t c = 0; c < C; ++c)
        g.at(r, c) = saved.at(r, c) * (n.grad.at(r, c) - inner);
    }
    px->accumulate(g);
  });
}

Var layer_norm(const Var& x, const Var& gain, const Var& bias, double eps) {
  const Tensor& X = x.value();
  int64_t R = X.rows(), C = X.cols();
  if (gain.value().rank() != 1 || gain.value().dim(0) != C ||
      bias.value().rank() != 1 || bias.value().dim(0) != C)
    throw DimensionError("layer_norm: gain/bias must match last extent");
  Tensor out({R, C});
  Tensor xhat({R, C});
  std::vector<double> inv_std(static_cast<size_t>(R));
  for (int64_t r = 0; r < R; ++r) {
    double mu = 0.0;
    for (int64_t c = 0; c < C; ++c) mu += X.at(r, c);
    mu /= static_cast<double>(C);
    double var = 0.0;
    for (int64_t c = 0; c < C; ++c) {
      double d = X.at(r, c) - mu;
      var += d * d;
    }
    var /= static_cast<double>(C);
    double is = 1.0 / std::sqrt(var + eps);
    inv_std[static_cast<size_t>(r)] = is;
    for (int64_t c = 0; c < C; ++c) {
      double xh = (X.at(r, c) - mu) * is;
      xhat.at(r, c) = xh;
      out.at(r, c) = gain.value()[c] * xh + bias.value()[c];
    }
  }
  auto px = x.node(), pg = gain.node(), pb = bias.node();
  return make_op(std::move(out), "layer_norm", {x, gain, bias},
                 [px, pg, pb, xhat, inv_std, R, C](Node& n) {
                   if (pg->requires_grad) {
                     Tensor g({C});
                     for (int64_t r = 0; r < R; ++r)
                       for (int64_t c = 0; c < C; ++c)
                         g[c] += n.grad.at(r, c) * xhat.at(r, c);
                     pg->accumulate(g);
                   }
                   if (pb->requires_grad) {
                     Tensor g({C});
                     for (int64_t r = 0; r < R; ++r)
                       for (int64_t c = 0; c < C; ++c) g[c] += n.grad.at(r, c);
                     pb->accumulate(g);
                   }
                   if (px->requires_grad) {
                     Tensor g({R, C});
                     for (int64_t r = 0; r < R; ++r) {
                       double m1 = 0.0, m2 = 0.0;
                       for (int64_t c = 0; c < C; ++c) {
                         double dy = n.grad.at(r, c) * pg->value[c];
                         m1 += dy;
                         m2 += dy * xhat.at(r, c);
                       }
                       m1 /= static_cast<double>(C);
                       m2 /= static_cast<double>(C);
                       double is = inv_std[static_cast<size_t>(r)];
                       for (int64_t c = 0; c < C; ++c) {
                         double dy = n.grad.at(r, c) * pg->value[c];
                         g.at(r, c) = (dy - m1 - xhat.at(r, c) * m2) * is;
                       }
                     }
                     px->accumulate(g);
                   }
                 });
}

Var cross_entropy(const Var& logits, const std::vector<int64_t>& targets) {
  const Tensor& X = logits.value();
  int64_t N = X.rows(), C = X.cols();
  if (static_cast<int64_t>(targets.size()) != N)
    throw DimensionError("cross_entropy: target count does not match rows");
  for (int64_t t : targets)
    if (t < 0 || t >= C)
      throw DimensionError("cross_entropy: target index out of range");
  Tensor probs({N, C});
  double loss = 0.0;
  for (int64_t r = 0; r < N; ++r) {
    double mx = X.at(r, 0);
    for (int64_t c = 1; c < C; ++c) mx = std::max(mx, X.at(r, c));
    double z = 0.0;
    for (int64_t c = 0; c < C; ++c) z += std::exp(X.at(r, c) - mx);
    double logz = std::log(z) + mx;
    for (int64_t c = 0; c < C; ++c)
      probs.at(r, c) = std::exp(X.at(r, c) - logz);
    loss -= X.at(r, targets[static_cast<size_t>(r)]) - logz;
  }
  loss /= static_cast<double>(N);
  auto px = logits.node();
  return make_op(Tensor::scalar(loss), "cross_entropy", {logits},
                 [px, probs, targets, N, C](Node& n) {
                   if (!px->requires_grad) return;
                   double g = n.grad[0] / static_cast<double>(N);
                   Tensor gx({N, C});
                   for (int64_t r = 0; r < N; ++r)
                     for (int64_t c = 0; c < C; ++c) {
                       double onehot =
                           (c == targets[static_cast<size_t>(r)]) ? 1.0 : 0.0;
                       gx.at(r, c) = g * (probs.at(r, c) - onehot);
                     }
                   px->accumulate(gx);
                 });
}

Var embedding_rows(const Var& table, const std::vector<int64_t>& ids) {
  const Tensor& T = table.value();
  int64_t V = T.rows(), D = T.cols();
  int64_t N = static_cast<int64_t>(ids.size());
  for (int64_t id : ids)
    if (id < 0 || id >= V)
      throw DimensionError("embedding_rows: id out of range");
  Tensor out({N, D});
  for (int64_t r = 0; r < N; ++r)
    for (int64_t c = 0; c < D; ++c)
      out.at(r, c) = T.at(ids[static_cast<size_t>(r)], c);
  auto pt = table.node();
  return make_op(std::move(out), "embedding_rows", {table},
                 [pt, ids, V, D, N](Node& n) {
                   if (!pt->requires_grad) return;
                   Tensor g({V, D});
                   for (int64_t r = 0; r < N; ++r)
                     for (int64_t c = 0; c < D; ++c)
                       g.at(ids[static_cast<size_t>(r)], c) += n.grad.at(r, c);
                   pt->accumulate(g);
                 });
}

}  // namespace codescope::nc
