#ifndef CHERNOFF_FD_STENCILS_HPP
#define CHERNOFF_FD_STENCILS_HPP

#include <vector>

namespace chernoff {

// Finite-difference weights for the der-th derivative at evaluation point z
// from arbitrarily spaced nodes xs (Fornberg's recursion).  The returned
// vector pairs with xs: sum_i w[i] f(xs[i]) approximates f^(der)(z) to the
// maximal order the node count allows.
std::vector<double> fd_weights(double z, const std::vector<double>& xs, int der);

}  // namespace chernoff

#endif
