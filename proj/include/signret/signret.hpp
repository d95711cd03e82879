#pragma once

// Umbrella header.
#include "signret/arith.hpp"
#include "signret/bitio.hpp"
#include "signret/codec.hpp"
#include "signret/dct.hpp"
#include "signret/errors.hpp"
#include "signret/evaluate.hpp"
#include "signret/frame.hpp"
#include "signret/grid.hpp"
#include "signret/image.hpp"
#include "signret/metrics.hpp"
#include "signret/quant.hpp"
#include "signret/rng.hpp"
#include "signret/solver.hpp"
#include "signret/sweep.hpp"
