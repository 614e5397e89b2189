#pragma once

// Bootstrap statistics for frequency response functions.

#include "frfstat/errors.hpp"
#include "frfstat/grid.hpp"
#include "frfstat/signal.hpp"
#include "frfstat/random.hpp"
#include "frfstat/ecdf.hpp"
#include "frfstat/bands.hpp"
#include "frfstat/density.hpp"
#include "frfstat/compare.hpp"
#include "frfstat/synthetic.hpp"
#include "frfstat/io.hpp"
