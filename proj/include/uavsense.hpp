#pragma once

#include "uavsense/array.hpp"
#include "uavsense/config.hpp"
#include "uavsense/config_io.hpp"
#include "uavsense/engine.hpp"
#include "uavsense/fusion.hpp"
#include "uavsense/geometry.hpp"
#include "uavsense/ofdm.hpp"
#include "uavsense/parallel.hpp"
#include "uavsense/random.hpp"
#include "uavsense/results_io.hpp"
#include "uavsense/selftest.hpp"
#include "uavsense/sensing.hpp"
#include "uavsense/sweep.hpp"
#include "uavsense/units.hpp"
