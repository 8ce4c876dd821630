#pragma once

// Differential forms over a declared field algebra, the wedge product, the
// Koszul exterior derivative and de Rham cohomology of a finite represented
// complex.
//
// The represented complex in degree n has coordinates (I, a): the form whose
// value on the increasing field tuple xi_I is the ring function h_a and which
// vanishes on every other increasing tuple. Cochains that are not pointwise
// linear (fields that are dependent at a point must pair consistently) are
// cut away before ranks are taken.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "diffeo/dynamics.hpp"
#include "diffeo/linalg.hpp"

namespace diffeo {

using AlgebraPtr = std::shared_ptr<const FieldAlgebra>;

// ---- function bases -------------------------------------------------------------

struct FunctionBasis {
  // f_i of the expansions h df_{i1} ^ ... ^ df_{in}.
  std::vector<SmoothFunction> generators;
  // Coefficient rings per degree; the last one is reused for higher degrees.
  std::vector<std::vector<SmoothFunction>> rings;
  std::vector<std::vector<std::string>> names;

  const std::vector<SmoothFunction>& ring(int degree) const;
  const std::vector<std::string>& ring_names(int degree) const;
};

// Polynomial from (exponents, coefficient) terms.
struct Monomial {
  std::vector<int> exponents;
  double coefficient = 1.0;
};
SmoothFunction polynomial_function(int dim, const std::vector<Monomial>& terms);

// Re and Im of (x + i y)^k, k = 0..degree, on the plane coordinates (x_off, x_off + 1)
// of R^dim: 1, cos k theta, sin k theta on the unit circle.
std::vector<SmoothFunction> harmonic_ring(int dim, int x_off, int degree, std::vector<std::string>* names = nullptr);
// Monomials of total degree <= degree accepted by `keep`.
std::vector<SmoothFunction> monomial_ring(int dim, int degree, std::vector<std::string>* names = nullptr,
                                          const std::function<bool(std::span<const int>)>& keep = {});
// Pointwise products a_i b_j.
std::vector<SmoothFunction> product_ring(const std::vector<SmoothFunction>& a, const std::vector<SmoothFunction>& b,
                                         std::vector<std::string>* names = nullptr,
                                         const std::vector<std::string>& a_names = {},
                                         const std::vector<std::string>& b_names = {});

FunctionBasis single_ring_basis(std::vector<SmoothFunction> ring, std::vector<std::string> names,
                                std::vector<SmoothFunction> generators = {});

// ---- forms ----------------------------------------------------------------------------

class DifferentialForm {
 public:
  using Evaluator = std::function<SmoothFunction(std::span<const VectorField>)>;

  DifferentialForm(AlgebraPtr algebra, int degree, Evaluator eval, std::string name = {});

  int degree() const { return degree_; }
  const AlgebraPtr& algebra() const { return algebra_; }
  const std::string& name() const { return name_; }

  SmoothFunction operator()(std::span<const VectorField> fields) const;
  SmoothFunction operator()(std::initializer_list<VectorField> fields) const;

  // 0-form h.
  static DifferentialForm function(AlgebraPtr algebra, SmoothFunction h, std::string name = {});
  // df: xi |-> xi(f).
  static DifferentialForm exact(AlgebraPtr algebra, SmoothFunction f, std::string name = {});
  // sum_t h_t df_{I_t}, with df_I(xi_1..xi_n) = det[xi_j(f_{i_k})].
  struct Term {
    SmoothFunction h;
    std::vector<int> indices;
  };
  static DifferentialForm expansion(AlgebraPtr algebra, std::vector<SmoothFunction> generators,
                                    std::vector<Term> terms, std::string name = {});

 private:
  AlgebraPtr algebra_;
  int degree_;
  Evaluator eval_;
  std::string name_;
};

// (k+l)!/(k! l!) Alt(omega (x) eta), Alt averaging over permutations.
DifferentialForm wedge(const DifferentialForm& omega, const DifferentialForm& eta);
// Koszul formula; brackets are resolved in the form's algebra (AlgebraNotClosed).
DifferentialForm exterior_derivative(const DifferentialForm& omega);
DifferentialForm add_forms(const DifferentialForm& a, const DifferentialForm& b, double c = 1.0);

// ---- represented complex --------------------------------------------------------------

struct CohomologyOptions {
  // 0 picks max(3 * largest ring, 60).
  int samples = 0;
  std::uint64_t seed = 17;
  RankPolicy svd{};
  double min_gap = 1e2;
  // Relative residual allowed when fitting derived functions back into a ring.
  double fit_tol = 1e-8;
  int jobs = 1;
};

// Precomputed sample tables shared by every degree.
class CochainComplex {
 public:
  CochainComplex(AlgebraPtr algebra, FunctionBasis basis, int max_degree, const CohomologyOptions& options = {});

  int field_count() const { return algebra_->size(); }
  int max_degree() const { return max_degree_; }
  const std::vector<Vector>& samples() const { return samples_; }

  // Coordinates of degree n: C(m, n) * |ring_n|.
  int cochain_dim(int n) const;
  // Matrix of d_n on the full cochain coordinates (rows: degree n+1).
  const Matrix& d_matrix(int n) const;
  // Orthonormal basis of the pointwise-linear cochains of degree n.
  const Matrix& tensorial_basis(int n) const;
  RankInfo tensorial_rank(int n) const;
  // Q_{n+1}^T d_n Q_n.
  Matrix restricted_d(int n) const;
  RankInfo ring_rank(int n) const;

 private:
  void build_tables(int jobs);
  Matrix assemble(int n) const;
  Matrix constraints(int n) const;

  AlgebraPtr algebra_;
  FunctionBasis basis_;
  int max_degree_;
  CohomologyOptions options_;
  std::vector<Vector> samples_;
  // values[deg][a][s], derived[deg][k][a][s]
  std::vector<std::vector<Vector>> values_;
  std::vector<std::vector<std::vector<Vector>>> derived_;
  std::vector<Matrix> ring_pinv_;
  std::vector<RankInfo> ring_rank_;
  std::vector<Matrix> d_;
  std::vector<Matrix> q_;
  std::vector<RankInfo> q_rank_;
};

Matrix assemble_d_matrix(AlgebraPtr algebra, const FunctionBasis& basis, int n, const CohomologyOptions& options = {});

struct CohomologyReport {
  std::string algebra;
  std::vector<int> degrees;
  std::vector<int> cochain_dim;     // C(m, n) |ring_n|
  std::vector<int> tensorial_dim;   // dim T^n
  std::vector<int> rank_d;          // rank d_n on T^n
  std::vector<int> dim_z;
  std::vector<int> dim_b;
  std::vector<int> betti;
  std::vector<double> d_gap;        // singular-value gap of each rank decision
  std::vector<double> tensorial_gap;
  std::vector<double> ring_gap;
  std::vector<Vector> d_singular_values;
  double d_squared = 0.0;           // max |d_{n+1} d_n|
  double closure_residual = 0.0;
  double jacobi_defect = 0.0;
  double svd_relative = 1e-9;
  double min_gap = 1e2;
  int samples = 0;
};

// ToleranceAmbiguous when any rank decision has a gap below options.min_gap.
CohomologyReport de_rham_cohomology(AlgebraPtr algebra, const FunctionBasis& basis, int max_degree,
                                    const CohomologyOptions& options = {});

}  // namespace diffeo
