#pragma once

#include "xray/bench.hpp"
#include "xray/dataset.hpp"
#include "xray/errors.hpp"
#include "xray/footprint.hpp"
#include "xray/heapgen.hpp"
#include "xray/json_io.hpp"
#include "xray/occupancy.hpp"
#include "xray/parallel.hpp"
#include "xray/png_io.hpp"
#include "xray/raster.hpp"
#include "xray/rng.hpp"
#include "xray/search.hpp"
#include "xray/sensor.hpp"
