#pragma once

#include "votermix/prob.hpp"

namespace votermix {

/// Cycle heat-bath Ising parameters and the derived noisy voter
/// correspondence: voter rate r = (e^{4 beta} - 1)/4 per cycle direction and
/// time scale theta = 2/(1 + e^{4 beta}).
struct IsingCycleParams {
    int n;
    double beta;
    double voter_rate;
    double theta_scale;
};

IsingCycleParams make_ising_params(int n, double beta);

/// Heat-bath single-spin-flip generator on {-1,+1}^n over the cycle: spin x
/// flips at rate [1 + exp(2 beta sigma(x)(sigma(x-1) + sigma(x+1)))]^{-1}.
/// States are bit-packed with +1 as bit 1, -1 as bit 0 (site i at bit i).
SparseGenerator ising_generator(int n, double beta);

/// Max entrywise |theta * G_voter - G_ising| over all matrix entries, where
/// G_voter is the noisy voter config generator on the cycle with
/// q(x, x+-1) = (e^{4 beta} - 1)/4.
double verify_equivalence(int n, double beta);

/// Worst relative detailed-balance violation of the Ising generator against
/// the cycle Gibbs weights e^{beta sum sigma sigma'}.
double ising_detailed_balance_error(int n, double beta);

}  // namespace votermix
