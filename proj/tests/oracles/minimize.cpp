#include "minimize.hpp"

#include "snapbeam/assembly.hpp"

#include <gsl/gsl_blas.h>
#include <gsl/gsl_multimin.h>

#include <cmath>

namespace oracles {

namespace {

struct Problem {
  const snapbeam::Model* model;
  const snapbeam::DofMap* dofs;
  double lambda;
  double h;
  Eigen::VectorXd scale;  // free dof = scale * search variable; rotations use 1/l
};

Eigen::VectorXd full(const Problem& p, const gsl_vector* x) {
  Eigen::VectorXd q = p.dofs->constrained_values();
  Eigen::VectorXd free(static_cast<Eigen::Index>(x->size));
  for (std::size_t i = 0; i < x->size; ++i)
    free[static_cast<Eigen::Index>(i)] = p.scale[static_cast<Eigen::Index>(i)] * gsl_vector_get(x, i);
  p.dofs->scatter(free, q);
  return q;
}

double energy_at(const Problem& p, const Eigen::VectorXd& q) {
  try {
    return snapbeam::total_potential(*p.model, q, p.lambda);
  } catch (const std::exception&) {
    return GSL_POSINF;
  }
}

double f(const gsl_vector* x, void* params) {
  const auto& p = *static_cast<Problem*>(params);
  return energy_at(p, full(p, x));
}

void df(const gsl_vector* x, void* params, gsl_vector* g) {
  const auto& p = *static_cast<Problem*>(params);
  Eigen::VectorXd q = full(p, x);
  const auto& free = p.dofs->free_dofs();
  for (std::size_t i = 0; i < free.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(free[i]);
    const double saved = q[k];
    const double step = p.h * p.scale[static_cast<Eigen::Index>(i)];
    q[k] = saved + step;
    const double fp = energy_at(p, q);
    q[k] = saved - step;
    const double fm = energy_at(p, q);
    q[k] = saved;
    gsl_vector_set(g, i, (fp - fm) / (2.0 * p.h));
  }
}

void fdf(const gsl_vector* x, void* params, double* value, gsl_vector* g) {
  *value = f(x, params);
  df(x, params, g);
}

}  // namespace

Minimum minimize_potential(const snapbeam::Model& model, const Eigen::VectorXd& q0, double lambda) {
  const snapbeam::DofMap dofs(model);
  const double l = model.characteristic_length();
  const std::size_t n = dofs.free_count();
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    if (dofs.free_dofs()[i] % snapbeam::dofs_per_node == 2) scale[static_cast<Eigen::Index>(i)] = 1.0 / l;
  Problem problem{&model, &dofs, lambda, 1e-7 * l, scale};

  gsl_multimin_function_fdf fn;
  fn.n = n;
  fn.f = f;
  fn.df = df;
  fn.fdf = fdf;
  fn.params = &problem;

  gsl_vector* x = gsl_vector_alloc(n);
  const Eigen::VectorXd start = dofs.gather(q0);
  for (std::size_t i = 0; i < n; ++i)
    gsl_vector_set(x, i, start[static_cast<Eigen::Index>(i)] / scale[static_cast<Eigen::Index>(i)]);

  gsl_multimin_fdfminimizer* s = gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, n);
  gsl_multimin_fdfminimizer_set(s, &fn, x, 1e-4 * model.characteristic_length(), 0.1);

  // Gradient tolerance relative to the rest-state force scale of the problem.
  Minimum out;
  const double tol = 1e-9 * (1.0 + std::abs(lambda));
  // A stalled line search restarts from the current point with a fresh Hessian
  // estimate; two stalls in a row without progress end the search.
  int status = GSL_CONTINUE;
  int stalls = 0;
  double last_stall = GSL_POSINF;
  for (out.iterations = 0; out.iterations < 50000 && status == GSL_CONTINUE; ++out.iterations) {
    if (gsl_multimin_fdfminimizer_iterate(s) != GSL_SUCCESS) {
      if (s->f >= last_stall && ++stalls >= 2) break;
      last_stall = s->f;
      gsl_multimin_fdfminimizer_restart(s);
      continue;
    }
    stalls = 0;
    status = gsl_multimin_test_gradient(s->gradient, tol);
  }
  out.q = full(problem, s->x);
  out.energy = s->f;
  out.gradient_norm = gsl_blas_dnrm2(s->gradient);

  gsl_multimin_fdfminimizer_free(s);
  gsl_vector_free(x);
  return out;
}

}  // namespace oracles
