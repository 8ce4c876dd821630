#include "diffeo/smooth_map.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

namespace diffeo {

Vector SmoothMap::evaluate(std::span<const double> x) const {
  require(static_cast<int>(x.size()) == in_dim(), ErrorCode::kShapeMismatch,
          "map expects " + std::to_string(in_dim()) + " inputs, got " + std::to_string(x.size()));
  return evaluate(Jet::identity(x, 0)).value();
}

Jet jet_at(const SmoothMap& f, std::span<const double> point, int order) {
  return f.evaluate(Jet::coordinates(point, order));
}

double evaluate_scalar(const SmoothMap& f, std::span<const double> x) {
  require(f.out_dim() == 1, ErrorCode::kNonScalarTarget, "evaluate_scalar on a vector map");
  return f.evaluate(x)[0];
}

namespace {

void require_input(const SmoothMap& f, const Jet& x) {
  require(x.target_dim() == f.in_dim(), ErrorCode::kShapeMismatch,
          "map expects " + std::to_string(f.in_dim()) + " inputs, jet has " +
              std::to_string(x.target_dim()) + " components");
}

class AffineMap final : public SmoothMap {
 public:
  AffineMap(int in, int out, Vector a, Vector b) : in_(in), out_(out), a_(std::move(a)), b_(std::move(b)) {
    require(a_.size() == static_cast<std::size_t>(in * out), ErrorCode::kShapeMismatch, "affine matrix size");
    require(b_.size() == static_cast<std::size_t>(out), ErrorCode::kShapeMismatch, "affine offset size");
  }
  int in_dim() const override { return in_; }
  int out_dim() const override { return out_; }

  Vector evaluate(std::span<const double> x) const override {
    require(static_cast<int>(x.size()) == in_, ErrorCode::kShapeMismatch, "affine map input size");
    Vector y = b_;
    for (int i = 0; i < out_; ++i) {
      for (int j = 0; j < in_; ++j) y[static_cast<std::size_t>(i)] += a_[static_cast<std::size_t>(i * in_ + j)] * x[static_cast<std::size_t>(j)];
    }
    return y;
  }

  Jet evaluate(const Jet& x) const override {
    require_input(*this, x);
    Jet y(x.num_vars(), x.order(), out_, Vector(x.origin().begin(), x.origin().end()));
    for (std::size_t k = 0; k < x.size(); ++k) {
      auto src = x.entry(k);
      auto dst = y.entry(k);
      for (int i = 0; i < out_; ++i) {
        double acc = k == 0 ? b_[static_cast<std::size_t>(i)] : 0.0;
        for (int j = 0; j < in_; ++j) acc += a_[static_cast<std::size_t>(i * in_ + j)] * src[static_cast<std::size_t>(j)];
        dst[static_cast<std::size_t>(i)] = acc;
      }
    }
    return y;
  }

 private:
  int in_;
  int out_;
  Vector a_;
  Vector b_;
};

class ComposedMap final : public SmoothMap {
 public:
  ComposedMap(SmoothMapPtr outer, SmoothMapPtr inner) : outer_(std::move(outer)), inner_(std::move(inner)) {
    require(outer_->in_dim() == inner_->out_dim(), ErrorCode::kShapeMismatch,
            "compose: outer takes " + std::to_string(outer_->in_dim()) + " inputs, inner yields " +
                std::to_string(inner_->out_dim()));
  }
  int in_dim() const override { return inner_->in_dim(); }
  int out_dim() const override { return outer_->out_dim(); }
  Vector evaluate(std::span<const double> x) const override { return outer_->evaluate(inner_->evaluate(x)); }
  Jet evaluate(const Jet& x) const override { return outer_->evaluate(inner_->evaluate(x)); }

 private:
  SmoothMapPtr outer_;
  SmoothMapPtr inner_;
};

class StackedMap final : public SmoothMap {
 public:
  explicit StackedMap(std::vector<SmoothMapPtr> maps) : maps_(std::move(maps)) {
    require(!maps_.empty(), ErrorCode::kShapeMismatch, "stack of zero maps");
    for (const auto& m : maps_) {
      require(m->in_dim() == maps_[0]->in_dim(), ErrorCode::kShapeMismatch, "stacked maps differ in input");
      out_ += m->out_dim();
    }
  }
  int in_dim() const override { return maps_[0]->in_dim(); }
  int out_dim() const override { return out_; }
  Vector evaluate(std::span<const double> x) const override {
    Vector y;
    for (const auto& m : maps_) {
      Vector part = m->evaluate(x);
      y.insert(y.end(), part.begin(), part.end());
    }
    return y;
  }
  Jet evaluate(const Jet& x) const override {
    std::vector<Jet> parts;
    for (const auto& m : maps_) parts.push_back(m->evaluate(x));
    return Jet::stack(parts);
  }

 private:
  std::vector<SmoothMapPtr> maps_;
  int out_ = 0;
};

class BlockDiagonalMap final : public SmoothMap {
 public:
  explicit BlockDiagonalMap(std::vector<SmoothMapPtr> maps) : maps_(std::move(maps)) {
    require(!maps_.empty(), ErrorCode::kShapeMismatch, "block_diagonal of zero maps");
    for (const auto& m : maps_) {
      in_ += m->in_dim();
      out_ += m->out_dim();
    }
  }
  int in_dim() const override { return in_; }
  int out_dim() const override { return out_; }
  Vector evaluate(std::span<const double> x) const override {
    Vector y;
    std::size_t offset = 0;
    for (const auto& m : maps_) {
      Vector part = m->evaluate(x.subspan(offset, static_cast<std::size_t>(m->in_dim())));
      offset += static_cast<std::size_t>(m->in_dim());
      y.insert(y.end(), part.begin(), part.end());
    }
    return y;
  }
  Jet evaluate(const Jet& x) const override {
    require_input(*this, x);
    std::vector<Jet> parts;
    int offset = 0;
    for (const auto& m : maps_) {
      std::vector<Jet> comps;
      for (int c = 0; c < m->in_dim(); ++c) comps.push_back(x.component(offset + c));
      offset += m->in_dim();
      parts.push_back(m->evaluate(Jet::stack(comps)));
    }
    return Jet::stack(parts);
  }

 private:
  std::vector<SmoothMapPtr> maps_;
  int in_ = 0;
  int out_ = 0;
};

class TaylorPolynomialMap final : public SmoothMap {
 public:
  explicit TaylorPolynomialMap(Jet j) : jet_(std::move(j)) {}
  int in_dim() const override { return jet_.num_vars(); }
  int out_dim() const override { return jet_.target_dim(); }

  Vector evaluate(std::span<const double> x) const override {
    require(static_cast<int>(x.size()) == in_dim(), ErrorCode::kShapeMismatch, "polynomial input size");
    Vector y(static_cast<std::size_t>(out_dim()), 0.0);
    for (std::size_t k = 0; k < jet_.size(); ++k) {
      const MultiIndex& alpha = jet_.layout().index(k);
      double mono = 1.0 / alpha.factorial();
      for (int i = 0; i < in_dim(); ++i) {
        for (int e = 0; e < alpha[i]; ++e) mono *= x[static_cast<std::size_t>(i)] - jet_.origin()[static_cast<std::size_t>(i)];
      }
      for (int c = 0; c < out_dim(); ++c) y[static_cast<std::size_t>(c)] += jet_.at(k, c) * mono;
    }
    return y;
  }

  Jet evaluate(const Jet& x) const override {
    require_input(*this, x);
    // Recenter at full degree first, then match the requested order; terms above
    // the polynomial's own degree are zero.
    Jet own = recenter(jet_, x.value());
    own = own.order() >= x.order() ? own.truncate(x.order()) : extend(own, 0, x.order());
    return jet_compose(own, x);
  }

 private:
  Jet jet_;
};

class LinearCombinationMap final : public SmoothMap {
 public:
  LinearCombinationMap(std::vector<SmoothMapPtr> maps, Vector w) : maps_(std::move(maps)), w_(std::move(w)) {
    require(!maps_.empty() && maps_.size() == w_.size(), ErrorCode::kShapeMismatch, "linear_combination sizes");
    for (const auto& m : maps_) {
      require(m->in_dim() == maps_[0]->in_dim() && m->out_dim() == maps_[0]->out_dim(),
              ErrorCode::kShapeMismatch, "linear_combination of maps with different shapes");
    }
  }
  int in_dim() const override { return maps_[0]->in_dim(); }
  int out_dim() const override { return maps_[0]->out_dim(); }
  Vector evaluate(std::span<const double> x) const override {
    Vector y(static_cast<std::size_t>(out_dim()), 0.0);
    for (std::size_t i = 0; i < maps_.size(); ++i) {
      if (w_[i] == 0.0) continue;
      Vector part = maps_[i]->evaluate(x);
      for (std::size_t c = 0; c < y.size(); ++c) y[c] += w_[i] * part[c];
    }
    return y;
  }
  Jet evaluate(const Jet& x) const override {
    Jet y(x.num_vars(), x.order(), out_dim(), Vector(x.origin().begin(), x.origin().end()));
    for (std::size_t i = 0; i < maps_.size(); ++i) {
      if (w_[i] == 0.0) continue;
      y = jet_axpy(y, w_[i], maps_[i]->evaluate(x));
    }
    return y;
  }

 private:
  std::vector<SmoothMapPtr> maps_;
  Vector w_;
};

class ProductMap final : public SmoothMap {
 public:
  ProductMap(SmoothMapPtr f, SmoothMapPtr g) : f_(std::move(f)), g_(std::move(g)) {
    require(f_->out_dim() == 1, ErrorCode::kNonScalarTarget, "product: first factor must be scalar");
    require(f_->in_dim() == g_->in_dim(), ErrorCode::kShapeMismatch, "product factors differ in input");
  }
  int in_dim() const override { return f_->in_dim(); }
  int out_dim() const override { return g_->out_dim(); }
  Vector evaluate(std::span<const double> x) const override {
    const double a = f_->evaluate(x)[0];
    Vector y = g_->evaluate(x);
    for (double& v : y) v *= a;
    return y;
  }
  Jet evaluate(const Jet& x) const override { return jet_scale_by(f_->evaluate(x), g_->evaluate(x)); }

 private:
  SmoothMapPtr f_;
  SmoothMapPtr g_;
};

class DirectionalDerivativeMap final : public SmoothMap {
 public:
  DirectionalDerivativeMap(SmoothMapPtr f, SmoothMapPtr v) : f_(std::move(f)), v_(std::move(v)) {
    require(v_->in_dim() == f_->in_dim() && v_->out_dim() == f_->in_dim(), ErrorCode::kShapeMismatch,
            "directional_derivative: velocity must map the domain of f to itself");
  }
  int in_dim() const override { return f_->in_dim(); }
  int out_dim() const override { return f_->out_dim(); }

  Jet evaluate(const Jet& x) const override {
    require_input(*this, x);
    // Terms of x of degree order+1 never meet the t-linear part, so padding
    // them with zeros is exact.
    const int k = x.num_vars();
    const int order = x.order();
    Jet wide = extend(x, 1, order + 1);
    Jet t(k + 1, order + 1, 1, Vector(wide.origin().begin(), wide.origin().end()));
    t.at(t.layout().position(MultiIndex::unit(k + 1, k)), 0) = 1.0;
    Jet line = jet_add(wide, jet_scale_by(t, v_->evaluate(wide)));
    Jet along = f_->evaluate(line);
    return slice(partial_derivative(along, k), k);
  }

 private:
  SmoothMapPtr f_;
  SmoothMapPtr v_;
};

class DeterminantMap final : public SmoothMap {
 public:
  DeterminantMap(SmoothMapPtr entries, int n) : entries_(std::move(entries)), n_(n) {
    require(entries_->out_dim() == n * n, ErrorCode::kShapeMismatch, "determinant needs n*n entries");
  }
  int in_dim() const override { return entries_->in_dim(); }
  int out_dim() const override { return 1; }
  Jet evaluate(const Jet& x) const override {
    Jet m = entries_->evaluate(x);
    std::vector<Jet> e;
    for (int i = 0; i < n_ * n_; ++i) e.push_back(m.component(i));
    std::vector<int> perm(static_cast<std::size_t>(n_));
    std::iota(perm.begin(), perm.end(), 0);
    Jet det(x.num_vars(), x.order(), 1, Vector(x.origin().begin(), x.origin().end()));
    do {
      int inversions = 0;
      for (int i = 0; i < n_; ++i) {
        for (int j = i + 1; j < n_; ++j) inversions += perm[static_cast<std::size_t>(i)] > perm[static_cast<std::size_t>(j)];
      }
      Jet term = e[static_cast<std::size_t>(perm[0])];
      for (int i = 1; i < n_; ++i) term = jet_mul(term, e[static_cast<std::size_t>(i * n_ + perm[static_cast<std::size_t>(i)])]);
      det = jet_axpy(det, inversions % 2 == 0 ? 1.0 : -1.0, term);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return det;
  }

 private:
  SmoothMapPtr entries_;
  int n_;
};

}  // namespace

SmoothMapPtr affine_map(int in_dim, int out_dim, Vector matrix, Vector offset) {
  return std::make_shared<AffineMap>(in_dim, out_dim, std::move(matrix), std::move(offset));
}

SmoothMapPtr linear_map(int in_dim, int out_dim, Vector matrix) {
  return affine_map(in_dim, out_dim, std::move(matrix), Vector(static_cast<std::size_t>(out_dim), 0.0));
}

SmoothMapPtr identity_map(int dim) {
  Vector a(static_cast<std::size_t>(dim * dim), 0.0);
  for (int i = 0; i < dim; ++i) a[static_cast<std::size_t>(i * dim + i)] = 1.0;
  return linear_map(dim, dim, std::move(a));
}

SmoothMapPtr constant_map(int in_dim, Vector value) {
  const int out = static_cast<int>(value.size());
  return affine_map(in_dim, out, Vector(static_cast<std::size_t>(in_dim * out), 0.0), std::move(value));
}

SmoothMapPtr coordinate_projection(int in_dim, std::vector<int> components) {
  const int out = static_cast<int>(components.size());
  Vector a(static_cast<std::size_t>(in_dim * out), 0.0);
  for (int i = 0; i < out; ++i) {
    const int c = components[static_cast<std::size_t>(i)];
    require(c >= 0 && c < in_dim, ErrorCode::kShapeMismatch, "projection component out of range");
    a[static_cast<std::size_t>(i * in_dim + c)] = 1.0;
  }
  return linear_map(in_dim, out, std::move(a));
}

SmoothMapPtr compose(SmoothMapPtr outer, SmoothMapPtr inner) {
  return std::make_shared<ComposedMap>(std::move(outer), std::move(inner));
}

SmoothMapPtr stack(std::vector<SmoothMapPtr> maps) { return std::make_shared<StackedMap>(std::move(maps)); }

SmoothMapPtr block_diagonal(std::vector<SmoothMapPtr> maps) {
  return std::make_shared<BlockDiagonalMap>(std::move(maps));
}

SmoothMapPtr taylor_polynomial(const Jet& j) { return std::make_shared<TaylorPolynomialMap>(j); }

SmoothMapPtr linear_combination(std::vector<SmoothMapPtr> maps, Vector weights) {
  return std::make_shared<LinearCombinationMap>(std::move(maps), std::move(weights));
}

SmoothMapPtr product(SmoothMapPtr f, SmoothMapPtr g) {
  return std::make_shared<ProductMap>(std::move(f), std::move(g));
}

SmoothMapPtr directional_derivative(SmoothMapPtr f, SmoothMapPtr velocity) {
  return std::make_shared<DirectionalDerivativeMap>(std::move(f), std::move(velocity));
}

SmoothMapPtr determinant(SmoothMapPtr entries, int size) {
  return std::make_shared<DeterminantMap>(std::move(entries), size);
}

}  // namespace diffeo
