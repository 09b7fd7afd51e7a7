#pragma once

// Umbrella header for the whole library.

#include "mlrss/baseline.hpp"
#include "mlrss/calendar.hpp"
#include "mlrss/config.hpp"
#include "mlrss/date.hpp"
#include "mlrss/design.hpp"
#include "mlrss/detector.hpp"
#include "mlrss/errors.hpp"
#include "mlrss/evaluation.hpp"
#include "mlrss/ewma.hpp"
#include "mlrss/io.hpp"
#include "mlrss/nelder_mead.hpp"
#include "mlrss/pipeline.hpp"
#include "mlrss/profile_fit.hpp"
#include "mlrss/profiles.hpp"
#include "mlrss/rng.hpp"
#include "mlrss/series.hpp"
#include "mlrss/simulator.hpp"
