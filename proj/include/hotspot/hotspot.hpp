#pragma once

// Umbrella header for the hotspot spatial-statistics library.

#include "hotspot/autocorr.hpp"
#include "hotspot/csv.hpp"
#include "hotspot/datetime.hpp"
#include "hotspot/ebi.hpp"
#include "hotspot/errors.hpp"
#include "hotspot/geo.hpp"
#include "hotspot/geojson.hpp"
#include "hotspot/ingest.hpp"
#include "hotspot/kde.hpp"
#include "hotspot/metadata.hpp"
#include "hotspot/parallel.hpp"
#include "hotspot/polygon.hpp"
#include "hotspot/rng.hpp"
#include "hotspot/synth.hpp"
#include "hotspot/temporal.hpp"
#include "hotspot/version.hpp"
#include "hotspot/weights.hpp"
#include "hotspot/zones.hpp"
