#pragma once
// The phi_0 / phi_1 gadgets and product networks built from the sawtooth
// approximation of t^2.  Factors are carried as affine expressions whose
// value is exactly zero only when every node they reference is zero; this
// makes zero-annihilation exact independently of summation order.

#include <cstddef>
#include <vector>

#include "relucoll/network.hpp"

namespace rc {

enum class Gadget { Phi0, Phi1 };

using Lin = NetBuilder::Lin;

// relu(x) - relu(-x).
Lin signed_pair(NetBuilder& b, const Lin& x);

// phi_1: identity on [-1,1], zero outside (-2,2), linear in between.
Lin phi1_factor(NetBuilder& b, const Lin& x);

// phi_0: 1 on [-1,1], zero outside (-2,2), linear in between.  Returns a
// single non-negative node.
Lin phi0_factor(NetBuilder& b, const Lin& x);

// Sawtooth refinement depth for a d-fold product with total error <= delta/2.
int levels_for(std::size_t d, double delta);

// Balanced binary product tree over the factors (each in [-1,1]).  The root
// product is returned as an affine expression; inner products are
// materialized as signed pairs.
Lin emit_product(NetBuilder& b, std::vector<Lin> factors, int levels);

ReluNetwork phi1_network();
ReluNetwork phi0_network();

// prod_j x_j on [-1,1]^d within delta, exactly 0 when any x_j = 0.
ReluNetwork product_net(std::size_t d, double delta);

// prod_j phi(x_j) on [-2,2]^d within delta, exactly 0 outside (-2,2)^d.
ReluNetwork truncated_product_net(std::size_t d, double delta, Gadget which);

}  // namespace rc
