#pragma once

#include "cpforecast/config.hpp"
#include "cpforecast/engine.hpp"
#include "cpforecast/forecasters/ar.hpp"
#include "cpforecast/forecasters/lag_regression.hpp"
#include "cpforecast/forecasters/ma.hpp"
#include "cpforecast/forecasters/point_forecaster.hpp"
#include "cpforecast/forecasters/theta.hpp"
#include "cpforecast/methods/error_forecast.hpp"
#include "cpforecast/methods/saturation.hpp"
#include "cpforecast/methods/trackers.hpp"
#include "cpforecast/metrics.hpp"
#include "cpforecast/panels.hpp"
#include "cpforecast/series.hpp"
#include "cpforecast/simulate.hpp"
#include "cpforecast/version.hpp"
#include "cpforecast/weighted_quantile.hpp"
