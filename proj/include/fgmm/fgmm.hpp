#pragma once

#include "fgmm/design.hpp"
#include "fgmm/em.hpp"
#include "fgmm/fourier.hpp"
#include "fgmm/metrics.hpp"
#include "fgmm/model.hpp"
#include "fgmm/music.hpp"
#include "fgmm/order.hpp"
#include "fgmm/random.hpp"
#include "fgmm/reduce.hpp"
#include "fgmm/types.hpp"
#include "fgmm/weights.hpp"
