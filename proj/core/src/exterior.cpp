#include "diffeo/exterior.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace diffeo {

namespace {

std::vector<std::vector<int>> subsets(int m, int n) {
  std::vector<std::vector<int>> out;
  if (n < 0 || n > m) return out;
  std::vector<int> cur(static_cast<std::size_t>(n));
  std::iota(cur.begin(), cur.end(), 0);
  while (true) {
    out.push_back(cur);
    int i = n - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == m - n + i) --i;
    if (i < 0) break;
    ++cur[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < n; ++j) cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

int subset_index(const std::vector<std::vector<int>>& all, const std::vector<int>& s) {
  auto it = std::lower_bound(all.begin(), all.end(), s);
  return it != all.end() && *it == s ? static_cast<int>(it - all.begin()) : -1;
}

// Sorts `list` in place; returns the permutation sign, or 0 on a repeat.
int sort_sign(std::vector<int>& list) {
  int sign = 1;
  for (std::size_t i = 1; i < list.size(); ++i)
    for (std::size_t j = i; j > 0 && list[j - 1] > list[j]; --j) {
      std::swap(list[j - 1], list[j]);
      sign = -sign;
    }
  for (std::size_t i = 1; i < list.size(); ++i)
    if (list[i] == list[i - 1]) return 0;
  return sign;
}

std::vector<int> without(const std::vector<int>& s, std::size_t i) {
  std::vector<int> out;
  for (std::size_t k = 0; k < s.size(); ++k)
    if (k != i) out.push_back(s[k]);
  return out;
}

void parallel_for(int count, int jobs, const std::function<void(int)>& body) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < count && !failed; i = next++) {
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

double binomial(int m, int n) {
  if (n < 0 || n > m) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= n; ++i) r = r * (m - n + i) / i;
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

std::string monomial_name(std::span<const int> e) {
  std::string s;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += "x" + std::to_string(i + 1);
    if (e[i] > 1) s += "^" + std::to_string(e[i]);
  }
  return s.empty() ? "1" : s;
}

}  // namespace

// ---- bases ----------------------------------------------------------------------------

const std::vector<SmoothFunction>& FunctionBasis::ring(int degree) const {
  require(!rings.empty(), ErrorCode::kBasisDegenerate, "basis has no coefficient ring");
  return rings[static_cast<std::size_t>(std::min<int>(degree, static_cast<int>(rings.size()) - 1))];
}

const std::vector<std::string>& FunctionBasis::ring_names(int degree) const {
  static const std::vector<std::string> none;
  if (names.empty()) return none;
  return names[static_cast<std::size_t>(std::min<int>(degree, static_cast<int>(names.size()) - 1))];
}

SmoothFunction polynomial_function(int dim, const std::vector<Monomial>& terms) {
  int degree = 0;
  for (const auto& t : terms) {
    require(static_cast<int>(t.exponents.size()) == dim, ErrorCode::kShapeMismatch, "monomial arity");
    degree = std::max(degree, std::accumulate(t.exponents.begin(), t.exponents.end(), 0));
  }
  Jet j(dim, degree, 1);
  for (const auto& t : terms) {
    const MultiIndex alpha(t.exponents);
    j.at(j.layout().position(alpha), 0) += t.coefficient * alpha.factorial();
  }
  return taylor_polynomial(j);
}

std::vector<SmoothFunction> harmonic_ring(int dim, int x_off, int degree, std::vector<std::string>* names) {
  require(x_off >= 0 && x_off + 1 < dim, ErrorCode::kShapeMismatch, "plane coordinates outside the ambient");
  std::vector<SmoothFunction> out;
  const std::string x = "x" + std::to_string(x_off + 1), y = "x" + std::to_string(x_off + 2);
  for (int k = 0; k <= degree; ++k) {
    // (x + iy)^k = sum_j C(k, j) x^(k-j) (iy)^j
    std::vector<Monomial> re, im;
    for (int j = 0; j <= k; ++j) {
      std::vector<int> e(static_cast<std::size_t>(dim), 0);
      e[static_cast<std::size_t>(x_off)] = k - j;
      e[static_cast<std::size_t>(x_off + 1)] = j;
      const double c = binomial(k, j);
      switch (j % 4) {
        case 0: re.push_back({e, c}); break;
        case 1: im.push_back({e, c}); break;
        case 2: re.push_back({e, -c}); break;
        default: im.push_back({e, -c}); break;
      }
    }
    out.push_back(polynomial_function(dim, re));
    if (names) names->push_back(k == 0 ? "1" : "re(" + x + "+i" + y + ")^" + std::to_string(k));
    if (k > 0) {
      out.push_back(polynomial_function(dim, im));
      if (names) names->push_back("im(" + x + "+i" + y + ")^" + std::to_string(k));
    }
  }
  return out;
}

std::vector<SmoothFunction> monomial_ring(int dim, int degree, std::vector<std::string>* names,
                                          const std::function<bool(std::span<const int>)>& keep) {
  std::vector<SmoothFunction> out;
  const JetLayout& layout = *JetLayout::get(dim, degree);
  for (const MultiIndex& alpha : layout.indices()) {
    if (keep && !keep(alpha.entries())) continue;
    std::vector<int> e(alpha.entries().begin(), alpha.entries().end());
    out.push_back(polynomial_function(dim, {{e, 1.0}}));
    if (names) names->push_back(monomial_name(e));
  }
  return out;
}

std::vector<SmoothFunction> product_ring(const std::vector<SmoothFunction>& a, const std::vector<SmoothFunction>& b,
                                         std::vector<std::string>* names, const std::vector<std::string>& a_names,
                                         const std::vector<std::string>& b_names) {
  std::vector<SmoothFunction> out;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      out.push_back(product(a[i], b[j]));
      if (names) {
        const std::string l = i < a_names.size() ? a_names[i] : "a" + std::to_string(i);
        const std::string r = j < b_names.size() ? b_names[j] : "b" + std::to_string(j);
        names->push_back(l + "*" + r);
      }
    }
  return out;
}

FunctionBasis single_ring_basis(std::vector<SmoothFunction> ring, std::vector<std::string> names,
                                std::vector<SmoothFunction> generators) {
  FunctionBasis b;
  b.generators = std::move(generators);
  b.rings.push_back(std::move(ring));
  b.names.push_back(std::move(names));
  return b;
}

// ---- forms ----------------------------------------------------------------------------

DifferentialForm::DifferentialForm(AlgebraPtr algebra, int degree, Evaluator eval, std::string name)
    : algebra_(std::move(algebra)), degree_(degree), eval_(std::move(eval)), name_(std::move(name)) {
  require(algebra_ != nullptr, ErrorCode::kShapeMismatch, "forms need a field algebra");
  require(degree_ >= 0, ErrorCode::kShapeMismatch, "negative form degree");
}

SmoothFunction DifferentialForm::operator()(std::span<const VectorField> fields) const {
  require(static_cast<int>(fields.size()) == degree_, ErrorCode::kShapeMismatch,
          "a degree " + std::to_string(degree_) + " form takes that many fields");
  return eval_(fields);
}

SmoothFunction DifferentialForm::operator()(std::initializer_list<VectorField> fields) const {
  return (*this)(std::span<const VectorField>(fields.begin(), fields.size()));
}

DifferentialForm DifferentialForm::function(AlgebraPtr algebra, SmoothFunction h, std::string name) {
  require(h->out_dim() == 1, ErrorCode::kNonScalarTarget, "0-forms are functions");
  return DifferentialForm(std::move(algebra), 0, [h](std::span<const VectorField>) { return h; }, std::move(name));
}

DifferentialForm DifferentialForm::exact(AlgebraPtr algebra, SmoothFunction f, std::string name) {
  require(f->out_dim() == 1, ErrorCode::kNonScalarTarget, "d of a function");
  return DifferentialForm(
      std::move(algebra), 1, [f](std::span<const VectorField> xi) { return apply_derivation(xi[0], f); },
      std::move(name));
}

DifferentialForm DifferentialForm::expansion(AlgebraPtr algebra, std::vector<SmoothFunction> generators,
                                             std::vector<Term> terms, std::string name) {
  require(!terms.empty(), ErrorCode::kShapeMismatch, "an expansion needs at least one term");
  const int n = static_cast<int>(terms[0].indices.size());
  for (const auto& t : terms) {
    require(static_cast<int>(t.indices.size()) == n, ErrorCode::kShapeMismatch, "expansion terms of mixed degree");
    for (int i : t.indices)
      require(i >= 0 && i < static_cast<int>(generators.size()), ErrorCode::kShapeMismatch, "generator index");
  }
  auto eval = [generators, terms, n](std::span<const VectorField> xi) -> SmoothFunction {
    std::vector<SmoothMapPtr> parts;
    for (const auto& t : terms) {
      if (n == 0) {
        parts.push_back(t.h);
        continue;
      }
      // entry (k, j) = xi_j(f_{i_k})
      std::vector<SmoothMapPtr> entries;
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
          entries.push_back(apply_derivation(xi[static_cast<std::size_t>(j)],
                                             generators[static_cast<std::size_t>(t.indices[static_cast<std::size_t>(k)])]));
      parts.push_back(product(t.h, determinant(stack(std::move(entries)), n)));
    }
    return linear_combination(std::move(parts), Vector(parts.size(), 1.0));
  };
  return DifferentialForm(std::move(algebra), n, std::move(eval), std::move(name));
}

DifferentialForm add_forms(const DifferentialForm& a, const DifferentialForm& b, double c) {
  require(a.degree() == b.degree(), ErrorCode::kShapeMismatch, "sum of forms of different degree");
  require(a.algebra() == b.algebra(), ErrorCode::kShapeMismatch, "forms over different algebras");
  return DifferentialForm(
      a.algebra(), a.degree(),
      [a, b, c](std::span<const VectorField> xi) { return linear_combination({a(xi), b(xi)}, {1.0, c}); },
      a.name() + "+" + b.name());
}

DifferentialForm wedge(const DifferentialForm& omega, const DifferentialForm& eta) {
  require(omega.algebra() == eta.algebra(), ErrorCode::kShapeMismatch, "forms over different algebras");
  const int k = omega.degree(), l = eta.degree();
  require(k + l <= omega.algebra()->size(), ErrorCode::kDegreeOverflow,
          "degree " + std::to_string(k + l) + " exceeds the algebra's " + std::to_string(omega.algebra()->size()) +
              " fields");
  // prefactor (k+l)!/(k! l!) times the 1/(k+l)! of Alt.
  const double weight = 1.0 / (factorial(k) * factorial(l));
  auto eval = [omega, eta, k, l, weight](std::span<const VectorField> xi) -> SmoothFunction {
    std::vector<int> perm(static_cast<std::size_t>(k + l));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<SmoothMapPtr> parts;
    Vector weights;
    do {
      std::vector<int> copy = perm;
      const int sign = sort_sign(copy);
      std::vector<VectorField> a, b;
      for (int i = 0; i < k; ++i) a.push_back(xi[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])]);
      for (int i = k; i < k + l; ++i) b.push_back(xi[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])]);
      parts.push_back(product(omega(a), eta(b)));
      weights.push_back(sign * weight);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return linear_combination(std::move(parts), std::move(weights));
  };
  return DifferentialForm(omega.algebra(), k + l, std::move(eval), "(" + omega.name() + "^" + eta.name() + ")");
}

DifferentialForm exterior_derivative(const DifferentialForm& omega) {
  const int n = omega.degree();
  auto eval = [omega, n](std::span<const VectorField> xi) -> SmoothFunction {
    const FieldAlgebra& algebra = *omega.algebra();
    std::vector<SmoothMapPtr> parts;
    Vector weights;
    for (int i = 0; i <= n; ++i) {
      std::vector<VectorField> rest;
      for (int k = 0; k <= n; ++k)
        if (k != i) rest.push_back(xi[static_cast<std::size_t>(k)]);
      parts.push_back(apply_derivation(xi[static_cast<std::size_t>(i)], omega(rest)));
      weights.push_back(i % 2 == 0 ? 1.0 : -1.0);
    }
    for (int i = 0; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j) {
        std::vector<VectorField> args{resolve_bracket(algebra, xi[static_cast<std::size_t>(i)],
                                                      xi[static_cast<std::size_t>(j)])};
        for (int k = 0; k <= n; ++k)
          if (k != i && k != j) args.push_back(xi[static_cast<std::size_t>(k)]);
        parts.push_back(omega(args));
        weights.push_back((i + j) % 2 == 0 ? 1.0 : -1.0);
      }
    return linear_combination(std::move(parts), std::move(weights));
  };
  return DifferentialForm(omega.algebra(), n + 1, std::move(eval), "d" + omega.name());
}

// ---- represented complex --------------------------------------------------------------

CochainComplex::CochainComplex(AlgebraPtr algebra, FunctionBasis basis, int max_degree,
                               const CohomologyOptions& options)
    : algebra_(std::move(algebra)), basis_(std::move(basis)), max_degree_(max_degree), options_(options) {
  require(max_degree_ >= 0, ErrorCode::kShapeMismatch, "negative degree");
  std::size_t largest = 0;
  for (int n = 0; n <= max_degree_ + 1; ++n) largest = std::max(largest, basis_.ring(n).size());
  const int count = options_.samples > 0 ? options_.samples : std::max<int>(3 * static_cast<int>(largest), 60);
  samples_ = sample_points(*algebra_->space(), count, options_.seed);
  build_tables(options_.jobs);
  for (int n = 0; n <= max_degree_; ++n) d_.push_back(assemble(n));
  for (int n = 0; n <= max_degree_ + 1; ++n) {
    const Matrix c = constraints(n);
    if (c.rows == 0) {
      q_.push_back(Matrix::identity(cochain_dim(n)));
      q_rank_.push_back(RankInfo{0, {}, 0.0, std::numeric_limits<double>::infinity()});
    } else {
      q_rank_.push_back(numeric_rank(c, options_.svd));
      q_.push_back(null_space(c, options_.svd));
    }
  }
}

void CochainComplex::build_tables(int jobs) {
  const int m = field_count();
  const int degrees = max_degree_ + 2;
  const std::size_t s_count = samples_.size();
  values_.resize(static_cast<std::size_t>(degrees));
  derived_.resize(static_cast<std::size_t>(degrees));
  for (int n = 0; n < degrees; ++n) {
    const auto& ring = basis_.ring(n);
    const int r = static_cast<int>(ring.size());
    auto& vals = values_[static_cast<std::size_t>(n)];
    auto& der = derived_[static_cast<std::size_t>(n)];
    vals.assign(static_cast<std::size_t>(r), Vector(s_count));
    der.assign(static_cast<std::size_t>(m), std::vector<Vector>(static_cast<std::size_t>(r), Vector(s_count)));
    parallel_for(r * (m + 1), jobs, [&](int job) {
      const int a = job % r, k = job / r - 1;
      const SmoothFunction f = k < 0 ? ring[static_cast<std::size_t>(a)]
                                     : apply_derivation(algebra_->fields()[static_cast<std::size_t>(k)],
                                                        ring[static_cast<std::size_t>(a)]);
      Vector& out = k < 0 ? vals[static_cast<std::size_t>(a)] : der[static_cast<std::size_t>(k)][static_cast<std::size_t>(a)];
      for (std::size_t s = 0; s < s_count; ++s) out[s] = evaluate_scalar(*f, samples_[s]);
    });
    const Matrix sample = Matrix::from_columns(vals, static_cast<int>(s_count));
    ring_rank_.push_back(numeric_rank(sample, options_.svd));
    require(ring_rank_.back().rank == r, ErrorCode::kBasisDegenerate,
            "degree " + std::to_string(n) + " ring is dependent on the samples (rank " +
                std::to_string(ring_rank_.back().rank) + " of " + std::to_string(r) + ")");
    ring_pinv_.push_back(pseudo_inverse(sample, options_.svd));
  }
}

int CochainComplex::cochain_dim(int n) const {
  return static_cast<int>(binomial(field_count(), n)) * static_cast<int>(basis_.ring(n).size());
}

Matrix CochainComplex::assemble(int n) const {
  const int m = field_count();
  const auto in_sets = subsets(m, n);
  const auto out_sets = subsets(m, n + 1);
  const int r_in = static_cast<int>(basis_.ring(n).size());
  const int r_out = static_cast<int>(basis_.ring(n + 1).size());
  const auto& vals = values_[static_cast<std::size_t>(n)];
  const auto& der = derived_[static_cast<std::size_t>(n)];
  const Matrix& pinv = ring_pinv_[static_cast<std::size_t>(n + 1)];
  const Matrix& sample_out = Matrix::from_columns(values_[static_cast<std::size_t>(n + 1)],
                                                  static_cast<int>(samples_.size()));
  const std::size_t s_count = samples_.size();
  Matrix d(static_cast<int>(out_sets.size()) * r_out, static_cast<int>(in_sets.size()) * r_in);

  parallel_for(static_cast<int>(in_sets.size()) * r_in, options_.jobs, [&](int col) {
    const int set = col / r_in, a = col % r_in;
    const std::vector<int>& target = in_sets[static_cast<std::size_t>(set)];
    // omega(xi_list) / h_a: the sign when the list sorts to I, else 0.
    auto pairing = [&](std::vector<int> list) {
      const int sign = sort_sign(list);
      return sign != 0 && list == target ? sign : 0;
    };
    for (std::size_t j = 0; j < out_sets.size(); ++j) {
      const std::vector<int>& big = out_sets[j];
      Vector v(s_count, 0.0);
      bool any = false;
      for (std::size_t i = 0; i <= static_cast<std::size_t>(n); ++i) {
        const int sign = pairing(without(big, i));
        if (sign == 0) continue;
        const double w = (i % 2 == 0 ? 1.0 : -1.0) * sign;
        const Vector& dv = der[static_cast<std::size_t>(big[i])][static_cast<std::size_t>(a)];
        for (std::size_t s = 0; s < s_count; ++s) v[s] += w * dv[s];
        any = true;
      }
      for (std::size_t i = 0; i <= static_cast<std::size_t>(n); ++i)
        for (std::size_t k = i + 1; k <= static_cast<std::size_t>(n); ++k) {
          const Vector& c = algebra_->structure(big[i], big[k]);
          std::vector<int> rest;
          for (std::size_t q = 0; q <= static_cast<std::size_t>(n); ++q)
            if (q != i && q != k) rest.push_back(big[q]);
          double w = 0.0;
          for (int l = 0; l < m; ++l) {
            if (c[static_cast<std::size_t>(l)] == 0.0) continue;
            std::vector<int> list{l};
            list.insert(list.end(), rest.begin(), rest.end());
            w += c[static_cast<std::size_t>(l)] * pairing(list);
          }
          if (w == 0.0) continue;
          w *= (i + k) % 2 == 0 ? 1.0 : -1.0;
          const Vector& hv = vals[static_cast<std::size_t>(a)];
          for (std::size_t s = 0; s < s_count; ++s) v[s] += w * hv[s];
          any = true;
        }
      if (!any) continue;
      const Vector coeffs = multiply(pinv, v);
      const Vector back = multiply(sample_out, coeffs);
      double scale = 1.0, err = 0.0;
      for (std::size_t s = 0; s < s_count; ++s) {
        scale = std::max(scale, std::abs(v[s]));
        err = std::max(err, std::abs(back[s] - v[s]));
      }
      require(err <= options_.fit_tol * scale, ErrorCode::kBasisDegenerate,
              "derivatives of the degree " + std::to_string(n) + " ring leave the degree " + std::to_string(n + 1) +
                  " ring (fit residual " + std::to_string(err) + ")");
      for (int b = 0; b < r_out; ++b)
        d(static_cast<int>(j) * r_out + b, col) = coeffs[static_cast<std::size_t>(b)];
    }
  });
  return d;
}

Matrix CochainComplex::constraints(int n) const {
  if (n < 1) return Matrix(0, cochain_dim(n));
  const int m = field_count();
  const int dim = algebra_->space()->ambient_dim;
  const auto sets = subsets(m, n);
  const auto rests = subsets(m, n - 1);
  const int r = static_cast<int>(basis_.ring(n).size());
  const auto& vals = values_[static_cast<std::size_t>(n)];
  std::vector<Vector> rows;
  for (std::size_t s = 0; s < samples_.size(); ++s) {
    std::vector<Vector> velocities;
    for (const auto& f : algebra_->fields()) velocities.push_back(f.velocity->evaluate(samples_[s]));
    const Matrix kernel = null_space(Matrix::from_columns(velocities, dim), options_.svd);
    for (int q = 0; q < kernel.cols; ++q) {
      const Vector lambda = kernel.column(q);
      // sum_k lambda_k omega(xi_k, xi_K)(F_s) = 0 for every (n-1)-set K.
      for (const auto& rest : rests) {
        Vector row(static_cast<std::size_t>(cochain_dim(n)), 0.0);
        bool any = false;
        for (int k = 0; k < m; ++k) {
          std::vector<int> list{k};
          list.insert(list.end(), rest.begin(), rest.end());
          const int sign = sort_sign(list);
          if (sign == 0 || lambda[static_cast<std::size_t>(k)] == 0.0) continue;
          const int set = subset_index(sets, list);
          for (int a = 0; a < r; ++a)
            row[static_cast<std::size_t>(set * r + a)] += sign * lambda[static_cast<std::size_t>(k)] *
                                                          vals[static_cast<std::size_t>(a)][s];
          any = true;
        }
        if (any) rows.push_back(std::move(row));
      }
    }
  }
  if (rows.empty()) return Matrix(0, cochain_dim(n));
  return Matrix::from_rows(rows, cochain_dim(n));
}

const Matrix& CochainComplex::d_matrix(int n) const {
  require(n >= 0 && n <= max_degree_, ErrorCode::kShapeMismatch, "degree outside the assembled range");
  return d_[static_cast<std::size_t>(n)];
}

const Matrix& CochainComplex::tensorial_basis(int n) const {
  require(n >= 0 && n <= max_degree_ + 1, ErrorCode::kShapeMismatch, "degree outside the assembled range");
  return q_[static_cast<std::size_t>(n)];
}

RankInfo CochainComplex::tensorial_rank(int n) const {
  tensorial_basis(n);
  return q_rank_[static_cast<std::size_t>(n)];
}

RankInfo CochainComplex::ring_rank(int n) const {
  require(n >= 0 && n <= max_degree_ + 1, ErrorCode::kShapeMismatch, "degree outside the assembled range");
  return ring_rank_[static_cast<std::size_t>(n)];
}

Matrix CochainComplex::restricted_d(int n) const {
  const Matrix& qn = tensorial_basis(n);
  const Matrix& qm = tensorial_basis(n + 1);
  return multiply(qm.transpose(), multiply(d_matrix(n), qn));
}

Matrix assemble_d_matrix(AlgebraPtr algebra, const FunctionBasis& basis, int n, const CohomologyOptions& options) {
  CochainComplex complex(std::move(algebra), basis, n, options);
  return complex.d_matrix(n);
}

CohomologyReport de_rham_cohomology(AlgebraPtr algebra, const FunctionBasis& basis, int max_degree,
                                    const CohomologyOptions& options) {
  const int top = std::min(max_degree, algebra->size());
  CochainComplex complex(algebra, basis, top, options);
  CohomologyReport rep;
  rep.algebra.clear();
  for (const auto& f : algebra->fields()) rep.algebra += (rep.algebra.empty() ? "" : ",") + f.name;
  rep.closure_residual = algebra->closure_residual();
  rep.jacobi_defect = algebra->jacobi_defect();
  rep.svd_relative = options.svd.relative;
  rep.min_gap = options.min_gap;
  rep.samples = static_cast<int>(complex.samples().size());

  auto check_gap = [&](double gap, const std::string& what) {
    require(gap >= options.min_gap, ErrorCode::kToleranceAmbiguous,
            what + " has singular-value gap " + std::to_string(gap) + " < " + std::to_string(options.min_gap));
  };

  for (int n = 0; n <= top + 1; ++n) {
    const RankInfo ring = complex.ring_rank(n);
    rep.ring_gap.push_back(ring.gap);
    check_gap(ring.gap, "degree " + std::to_string(n) + " ring sample matrix");
  }
  for (int n = 0; n <= top; ++n) {
    rep.degrees.push_back(n);
    rep.cochain_dim.push_back(complex.cochain_dim(n));
    rep.tensorial_dim.push_back(complex.tensorial_basis(n).cols);
    const RankInfo t = complex.tensorial_rank(n);
    rep.tensorial_gap.push_back(t.gap);
    check_gap(t.gap, "degree " + std::to_string(n) + " pointwise constraints");
    const RankInfo d = numeric_rank(complex.restricted_d(n), options.svd);
    rep.rank_d.push_back(d.rank);
    rep.d_gap.push_back(d.gap);
    rep.d_singular_values.push_back(d.singular_values);
    check_gap(d.gap, "d_" + std::to_string(n));
  }
  for (int n = 0; n < top; ++n) {
    const Matrix dd = multiply(complex.d_matrix(n + 1), complex.d_matrix(n));
    rep.d_squared = std::max(rep.d_squared, dd.max_abs());
  }
  for (int n = 0; n <= top; ++n) {
    const int z = rep.tensorial_dim[static_cast<std::size_t>(n)] - rep.rank_d[static_cast<std::size_t>(n)];
    const int b = n == 0 ? 0 : rep.rank_d[static_cast<std::size_t>(n - 1)];
    rep.dim_z.push_back(z);
    rep.dim_b.push_back(b);
    rep.betti.push_back(z - b);
  }
  return rep;
}

}  // namespace diffeo
