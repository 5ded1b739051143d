#pragma once

#include "agent_dynamics.hpp"
#include "errors.hpp"
#include "hull_geometry.hpp"
#include "io.hpp"
#include "rate_certificates.hpp"
#include "scenario_library.hpp"
#include "switching_topology.hpp"
#include "trajectory_analysis.hpp"
