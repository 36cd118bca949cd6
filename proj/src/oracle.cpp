#include "rcs/oracle.hpp"

#include <string>

#include "rcs/errors.hpp"

namespace rcs {

std::unique_ptr<ProxDualModel> CompositeProblem::prox_dual(const Vector&, double) const {
    return nullptr;
}

Vector CompositeProblem::outer_subgradient(const ResidualState& state) const {
    Vector zeta(num_residuals());
    outer_subgradient(state, zeta);
    return zeta;
}

Vector CompositeProblem::block_subgradient(const ResidualState& state, const Vector& zeta,
                                           Block block) const {
    Vector out(block.size);
    block_subgradient(state, zeta, block, out);
    return out;
}

Vector CompositeProblem::subgradient(const Vector& x) const {
    const ResidualState state = init_state(x);
    const Vector zeta = outer_subgradient(state);
    return block_subgradient(state, zeta, Block{0, dim()});
}

void CompositeProblem::check_dim(const Vector& x) const {
    if (x.size() != dim()) {
        throw DimensionError("vector has length " + std::to_string(x.size()) + ", problem has d=" +
                             std::to_string(dim()));
    }
}

}  // namespace rcs
