#pragma once

// Synthetic positive objectives with known optima, and a uniform random
// search baseline that produces the same RunRecord layout as the optimizer.

#include <cstdint>
#include <vector>

#include "sofa/domain.hpp"
#include "sofa/objective.hpp"
#include "sofa/sofa.hpp"

namespace sofa {

// J == value everywhere. Throws std::invalid_argument unless value > 0.
Objective constant_objective(double value);

// J(z) = exp(-|z - center|^2 / width^2). Maximum 1 at center.
Objective gaussian_bump(std::vector<double> center, double width);

// J = h1 * bump(center1) + h2 * bump(center2). Requires h1 > h2 > 0 and
// |center1 - center2| > 3 width. The known optimum is the exact maximizer,
// which sits on the segment between the centers within ~h2/h1 e^{-d^2/w^2}
// of center1.
Objective two_bump(std::vector<double> center1, double h1, std::vector<double> center2, double h2,
                   double width);

// Broad bump plus a narrow, taller spike: a stress case for premature
// localization. J = base * bump(base_center, base_width)
//                 + spike * bump(spike_center, spike_width) + background.
Objective spiky(std::vector<double> base_center, double base_width, std::vector<double> spike_center,
                double spike_width, double spike_height, double background = 1e-3);

// Uniform i.i.d. points over the full domain.
RunRecord random_search_baseline(const SearchDomain& domain, const Objective& objective,
                                 std::size_t iterations, std::uint64_t seed);

}  // namespace sofa
