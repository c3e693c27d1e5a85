#pragma once

#include <Eigen/Core>

#include "fastreact/model.hpp"

namespace fastreact {

using Triple = Eigen::Vector3d;
using Pair = Eigen::Vector2d;

/// The diffusion nonlinearity F(u) = (f1(u1) + f12(u1,u2), f2(u2) + f21(u1,u2), f3(u3)).
Triple F_eval(const Triple& u, const ModelFunctions& funcs);

/// Jacobian of F; block upper-left 2x2 couples species 1 and 2, species 3 is diagonal.
Eigen::Matrix3d F_jacobian(const Triple& u, const ModelFunctions& funcs);

/// Inverts F on the nonnegative cone. Zero components of y pin the matching
/// component of u to zero exactly; u3 decouples into a scalar monotone solve;
/// the remaining 2x2 system is solved by damped Newton in log coordinates.
/// Post: |F_i(u) - y_i| <= tol * (1 + y_i) per component. Throws
/// SolverDivergence on stall.
Triple F_inverse(const Triple& y, const ModelFunctions& funcs, double tol = 1e-12);

/// Inverse of q_i: closed form when the bundle provides one, otherwise a
/// bracketed monotone solve with |q(x) - y| <= tol * (1 + |y|).
double q_inverse(double y, int species, const ModelFunctions& funcs, double tol = 1e-13);

/// g(u2, u3) = (u2 + c, u3 + c) with c = q1^-1(q2(u2) q3(u3)), the combined-density
/// map of the fast-reaction constraint.
Pair g_eval(const Pair& u23, const ModelFunctions& funcs);

/// Jacobian of g at a strictly positive point; its determinant is >= 1.
Eigen::Matrix2d g_jacobian(const Pair& u23, const ModelFunctions& funcs);

/// Inverts g on the nonnegative cone. Both components of g share the same
/// additive term, so u3 - u2 = w - v exactly and the problem reduces to one
/// scalar monotone equation solved with safeguarded Newton/bisection.
/// Post: |g(u) - (v,w)|_inf <= tol * (1 + |(v,w)|_inf).
Pair g_inverse(const Pair& vw, const ModelFunctions& funcs, double tol = 1e-12);

/// Closed-form inverse of the constraint reconstruction for q_i(s) = s:
/// given (v, w) = (u1 + u2, u1 + u3) with u1 = u2 u3, returns (u1, u2, u3).
/// Stable quadratic-root form; swapping v and w swaps u2 and u3.
Triple pair_inverse_closed_form(const Pair& vw);

/// Reconstructs (u1, u2, u3) from the combined densities (v, w) = (u1 + u2, u1 + u3)
/// on the fast-reaction constraint q1(u1) = q2(u2) q3(u3). Closed form when
/// q = identity, otherwise g_inverse plus one scalar inversion.
Triple reconstruct_constraint(const Pair& vw, const ModelFunctions& funcs,
                              double tol = 1e-13);

/// Entropy flux J_i(s) = integral_0^s min(1, sqrt(q_i' f_i' / (q_i (1 + q_i)))) dy.
/// Uses the closed form for f = q = identity, otherwise adaptive quadrature.
/// Nondecreasing, 1-Lipschitz, J_i(0) = 0.
double entropy_flux(double s, int species, const ModelFunctions& funcs);

/// Quadrature route for the entropy flux, independent of the closed form:
/// crossings of the integrand cap are bisected to 1e-12 and each smooth piece
/// integrated adaptively to 1e-10 total.
double entropy_flux_quadrature(double s, int species, const ModelFunctions& funcs);

}  // namespace fastreact
