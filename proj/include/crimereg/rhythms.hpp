#pragma once

// Wavelet analysis of weekly event series: detrending, Morlet transform,
// red-noise significance, band power, reconstruction and composed power.

#include "crimereg/rhythms/composed.hpp"
#include "crimereg/rhythms/detrend.hpp"
#include "crimereg/rhythms/significance.hpp"
#include "crimereg/rhythms/time_series.hpp"
#include "crimereg/rhythms/wavelet.hpp"
