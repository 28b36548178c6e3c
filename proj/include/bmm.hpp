#pragma once

#include "bmm/error.hpp"
#include "bmm/fees.hpp"
#include "bmm/impermanent_loss.hpp"
#include "bmm/market_loop.hpp"
#include "bmm/pool.hpp"
#include "bmm/random.hpp"
#include "bmm/simulation.hpp"
