#pragma once

#include "rrg/config.hpp"
#include "rrg/cycles.hpp"
#include "rrg/dynamics.hpp"
#include "rrg/experiments.hpp"
#include "rrg/limitfield.hpp"
#include "rrg/parallel.hpp"
#include "rrg/report.hpp"
#include "rrg/rng.hpp"
#include "rrg/spectra.hpp"
#include "rrg/stats.hpp"
#include "rrg/tower.hpp"
#include "rrg/words.hpp"
