#pragma once

#include <stdexcept>
#include <string>

namespace waveopt {

// Base class for everything this library throws on purpose.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad parameter values, malformed configs, mismatched grids.
struct config_error : error {
    using error::error;
};

// A grid cannot represent the requested feature (phase steps > pi per
// sample, masks narrower than a few samples, aliased output windows).
struct sampling_error : error {
    using error::error;
};

// Geometrically impossible request (negative propagation distance,
// coincident planes, overlapping apertures).
struct geometry_error : error {
    using error::error;
};

// Zero-power fields, zero amplitude pairs, zero-intensity distributions.
struct degenerate_error : error {
    using error::error;
};

// Power bookkeeping violated (power grew through a passive step,
// duplicate event ids, inconsistent before/after pairs).
struct accounting_error : error {
    using error::error;
};

// An event was offered to two different statistics. Deliberately its own
// type: triggering it is the point of the ledger.
struct complementarity_error : error {
    using error::error;
};

// Two image spots overlap too much to assign masses to either side.
struct separation_error : error {
    using error::error;
};

// A fringe fit did not converge or left too large a residual.
struct fit_error : error {
    using error::error;
};

} // namespace waveopt
