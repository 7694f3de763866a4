#pragma once

#include "qidmrg/dmrg.hpp"
#include "qidmrg/entanglement.hpp"

namespace qidmrg {

/// One- and two-orbital RDMs of a left-canonical chain (norm on the last
/// site), in chain positions. Correlators are built at each right end j and
/// carried leftward through the chain; an odd change at j picks up the parity
/// of every site strictly between the pair, which reproduces the oracle sign
/// convention. Throws std::invalid_argument for an unnormalized state.
OrbitalRdms measure_turning_point(const Mps& psi);

/// Schmidt spectra at cuts 0..N of the same chain, from the Gram matrices of
/// the right part.
std::vector<std::vector<double>> cut_spectra(const Mps& psi);

/// Relabels chain-position RDMs to original orbital indices; pairs whose
/// order flips are re-expressed with the lower original index first.
OrbitalRdms to_original_order(const OrbitalRdms& chain, const Permutation& ordering);

}  // namespace qidmrg
