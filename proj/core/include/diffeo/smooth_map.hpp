#pragma once

// Smooth maps R^in -> R^out that can be evaluated both at points and on jets.
// Every plaque, probe, vector field and function in the library is one of
// these; there is deliberately no way to wrap a point-only callback, since
// order-n tangency cannot be decided from point values.

#include <memory>
#include <span>
#include <vector>

#include "diffeo/jet.hpp"

namespace diffeo {

class SmoothMap {
 public:
  virtual ~SmoothMap() = default;

  virtual int in_dim() const = 0;
  virtual int out_dim() const = 0;

  // Pointwise value. The default evaluates an order-0 jet.
  virtual Vector evaluate(std::span<const double> x) const;
  // Jet of f o x, where x is a jet with target_dim == in_dim(). The result has
  // the variables, order and origin of x.
  virtual Jet evaluate(const Jet& x) const = 0;
};

using SmoothMapPtr = std::shared_ptr<const SmoothMap>;
// Functions are maps with out_dim() == 1.
using SmoothFunction = SmoothMapPtr;

// Jet of f at `point` in the coordinates x - point.
Jet jet_at(const SmoothMap& f, std::span<const double> point, int order);
double evaluate_scalar(const SmoothMap& f, std::span<const double> x);

// Row-major matrix with `rows` rows; y = A x + b.
SmoothMapPtr affine_map(int in_dim, int out_dim, Vector matrix, Vector offset);
SmoothMapPtr identity_map(int dim);
SmoothMapPtr constant_map(int in_dim, Vector value);
SmoothMapPtr linear_map(int in_dim, int out_dim, Vector matrix);
// x |-> (x_{c_0}, x_{c_1}, ...)
SmoothMapPtr coordinate_projection(int in_dim, std::vector<int> components);

SmoothMapPtr compose(SmoothMapPtr outer, SmoothMapPtr inner);
// Same input, outputs concatenated.
SmoothMapPtr stack(std::vector<SmoothMapPtr> maps);
// Inputs split in blocks, outputs concatenated: (x, y) |-> (f(x), g(y)).
SmoothMapPtr block_diagonal(std::vector<SmoothMapPtr> maps);
// The Taylor polynomial of j, expanded about j.origin().
SmoothMapPtr taylor_polynomial(const Jet& j);

// sum_i w_i f_i, all maps of the same shape.
SmoothMapPtr linear_combination(std::vector<SmoothMapPtr> maps, Vector weights);
// f * g with f scalar and g of any output dimension.
SmoothMapPtr product(SmoothMapPtr f, SmoothMapPtr g);
// x |-> Df(x) V(x), evaluated on jets through the straight-line curve x + t V(x).
SmoothMapPtr directional_derivative(SmoothMapPtr f, SmoothMapPtr velocity);
// Scalar function x |-> det[f_j(x) components], for a map with out_dim = k*k.
SmoothMapPtr determinant(SmoothMapPtr entries, int size);

}  // namespace diffeo
