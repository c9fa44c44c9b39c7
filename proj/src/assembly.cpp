#include "snapbeam/assembly.hpp"

namespace snapbeam {

namespace {

std::array<std::size_t, 6> element_indices(const Element& e) {
  const auto a = static_cast<std::size_t>(dofs_per_node * e.node_a);
  const auto b = static_cast<std::size_t>(dofs_per_node * e.node_b);
  return {a, a + 1, a + 2, b, b + 1, b + 2};
}

}  // namespace

corotational::Vector6 element_dofs(const Model&, const Element& element, const Eigen::VectorXd& q) {
  corotational::Vector6 local;
  const auto idx = element_indices(element);
  for (int i = 0; i < 6; ++i) local[i] = q[static_cast<Eigen::Index>(idx[i])];
  return local;
}

double total_strain_energy(const Model& model, const Eigen::VectorXd& q) {
  double energy = 0.0;
  for (std::size_t i = 0; i < model.elements.size(); ++i) {
    const Element& e = model.elements[i];
    energy += corotational::strain_energy(e, model.materials[e.material], model.nodes[e.node_a], model.nodes[e.node_b],
                                          element_dofs(model, e, q), i);
  }
  return energy;
}

double total_potential(const Model& model, const Eigen::VectorXd& q, double lambda) {
  const Eigen::VectorXd applied = lambda * reference_load(model) + gravity_load(model);
  return total_strain_energy(model, q) - applied.dot(q);
}

Eigen::VectorXd internal_force(const Model& model, const Eigen::VectorXd& q) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.dof_count()));
  for (std::size_t i = 0; i < model.elements.size(); ++i) {
    const Element& e = model.elements[i];
    const auto fe = corotational::internal_force(e, model.materials[e.material], model.nodes[e.node_a],
                                                 model.nodes[e.node_b], element_dofs(model, e, q), i);
    const auto idx = element_indices(e);
    for (int k = 0; k < 6; ++k) f[static_cast<Eigen::Index>(idx[k])] += fe[k];
  }
  return f;
}

Eigen::VectorXd full_residual(const Model& model, const Eigen::VectorXd& q, double lambda) {
  return internal_force(model, q) - lambda * reference_load(model) - gravity_load(model);
}

Eigen::MatrixXd full_tangent(const Model& model, const Eigen::VectorXd& q) {
  const auto n = static_cast<Eigen::Index>(model.dof_count());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < model.elements.size(); ++i) {
    const Element& e = model.elements[i];
    const auto ke = corotational::tangent_stiffness(e, model.materials[e.material], model.nodes[e.node_a],
                                                    model.nodes[e.node_b], element_dofs(model, e, q), i);
    const auto idx = element_indices(e);
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 6; ++c)
        K(static_cast<Eigen::Index>(idx[r]), static_cast<Eigen::Index>(idx[c])) += ke(r, c);
  }
  return K;
}

Assembly assemble(const Model& model, const DofMap& dofs, const Eigen::VectorXd& q, double lambda) {
  const auto nf = static_cast<Eigen::Index>(dofs.free_count());
  Assembly out;
  out.residual = Eigen::VectorXd::Zero(nf);
  out.tangent = Eigen::MatrixXd::Zero(nf, nf);

  // Elements are accumulated in index order, so the result is reproducible bit for bit.
  for (std::size_t i = 0; i < model.elements.size(); ++i) {
    const Element& e = model.elements[i];
    const auto resp = corotational::evaluate(e, model.materials[e.material], model.nodes[e.node_a],
                                             model.nodes[e.node_b], element_dofs(model, e, q), i);
    out.energy += resp.energy;
    const auto idx = element_indices(e);
    for (int r = 0; r < 6; ++r) {
      const long fr = dofs.free_index(idx[r]);
      if (fr < 0) continue;
      out.residual[fr] += resp.force[r];
      for (int c = 0; c < 6; ++c) {
        const long fc = dofs.free_index(idx[c]);
        if (fc >= 0) out.tangent(fr, fc) += resp.tangent(r, c);
      }
    }
  }

  const Eigen::VectorXd applied = lambda * reference_load(model) + gravity_load(model);
  out.residual -= dofs.gather(applied);
  return out;
}

Assembly assemble(const Model& model, const Eigen::VectorXd& q, double lambda) {
  return assemble(model, DofMap(model), q, lambda);
}

Eigen::MatrixXd length_scaled(const Model& model, const DofMap& dofs, Eigen::MatrixXd tangent) {
  const double l = model.characteristic_length() > 0.0 ? model.characteristic_length() : 1.0;
  const auto& free = dofs.free_dofs();
  for (std::size_t i = 0; i < free.size(); ++i) {
    if (free[i] % dofs_per_node != static_cast<std::size_t>(DofKind::theta)) continue;
    const auto k = static_cast<Eigen::Index>(i);
    tangent.row(k) /= l;
    tangent.col(k) /= l;
  }
  return tangent;
}

}  // namespace snapbeam
