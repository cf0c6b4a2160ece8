#pragma once

#include <random>

#include "rhocalc/derivation.hpp"

namespace rhocalc {

// Random generators shared by the fuzz checks, the tests and the CLI.

CycloScalar random_scalar(std::mt19937& rng, int conductor);
Monomial random_monomial(const Context& ctx, std::mt19937& rng, int max_exp = 2);
GradedPoly random_poly(const ContextPtr& ctx, std::mt19937& rng, int terms = 4, int max_exp = 2);
// Nonzero homogeneous element (falls back to a single monomial).
GradedPoly random_homogeneous(const ContextPtr& ctx, std::mt19937& rng, int terms = 3, int max_exp = 2);
// Homogeneous of the requested degree; may be zero if no monomial fits.
GradedPoly random_of_degree(const ContextPtr& ctx, const Degree& d, std::mt19937& rng, int terms = 3,
                            int max_exp = 2);
// Derivation of degree d with random components of the matching degrees.
Derivation random_derivation(const ContextPtr& ctx, const Degree& d, std::mt19937& rng, int terms = 2);

}  // namespace rhocalc
