#pragma once

#include "waveopt/analysis.hpp"
#include "waveopt/analytic.hpp"
#include "waveopt/elements.hpp"
#include "waveopt/errors.hpp"
#include "waveopt/export.hpp"
#include "waveopt/fft.hpp"
#include "waveopt/field.hpp"
#include "waveopt/gaussian_reference.hpp"
#include "waveopt/grid.hpp"
#include "waveopt/optical_config.hpp"
#include "waveopt/propagation.hpp"
#include "waveopt/scenario.hpp"
