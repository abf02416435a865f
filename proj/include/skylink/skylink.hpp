#pragma once

#include "bits.hpp"
#include "constants.hpp"
#include "csv.hpp"
#include "error.hpp"
#include "gravity.hpp"
#include "keys.hpp"
#include "link_budget.hpp"
#include "mission.hpp"
#include "numeric.hpp"
#include "pass_geometry.hpp"
#include "photonics.hpp"
#include "postprocess.hpp"
#include "privacy_amplification.hpp"
#include "qkd.hpp"
#include "reconciliation.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "scenario.hpp"
#include "scenario_io.hpp"
#include "teleport.hpp"
#include "two_qubit.hpp"
