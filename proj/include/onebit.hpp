#pragma once

#include "onebit/baselines.hpp"
#include "onebit/error.hpp"
#include "onebit/hamming.hpp"
#include "onebit/history.hpp"
#include "onebit/laws.hpp"
#include "onebit/lstsq.hpp"
#include "onebit/recovery.hpp"
#include "onebit/rng.hpp"
#include "onebit/signal_model.hpp"
