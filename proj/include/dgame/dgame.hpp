#pragma once

#include "config.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "extremal.hpp"
#include "game.hpp"
#include "harness.hpp"
#include "local_game.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "value_dp.hpp"
