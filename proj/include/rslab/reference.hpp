#ifndef RSLAB_REFERENCE_HPP
#define RSLAB_REFERENCE_HPP

#include "rslab/classfield.hpp"
#include "rslab/hecke.hpp"
#include "rslab/mellin.hpp"

namespace rslab::reference {

/*
 * Serial, unoptimised counterparts of the parallel kernels. They share no
 * code with the fast paths beyond the basic arithmetic helpers, and exist
 * to be compared against.
 */

/// Every a_p by direct counting, one prime at a time, then the Hecke recursion.
EigenvalueTable build_table(CurveSpec const & curve, std::int64_t n_max);

/*
 * Average of the central derivatives over all characters: for each
 * character the double sum over n and b with r_chi(n) from explicit
 * representation counts and V evaluated by quadrature at every point.
 * cutoff is the bound on n b^2.
 */
double average_direct(EigenvalueTable const & table, FundamentalDiscriminant const & D, std::int64_t cutoff,
                      KernelSpec const & spec = {});

/// L(1, chi_D) from h and w: 2 pi h / (w sqrt|D|).
double class_number_formula(FundamentalDiscriminant const & D);

} // namespace rslab::reference

#endif
