#pragma once

#include "gamediag/analysis.hpp"
#include "gamediag/channel.hpp"
#include "gamediag/conditions.hpp"
#include "gamediag/config.hpp"
#include "gamediag/error.hpp"
#include "gamediag/geometry.hpp"
#include "gamediag/monitor.hpp"
#include "gamediag/observer.hpp"
#include "gamediag/psychometric.hpp"
#include "gamediag/screens.hpp"
#include "gamediag/serialization.hpp"
#include "gamediag/service.hpp"
#include "gamediag/session.hpp"
#include "gamediag/staircase.hpp"
#include "gamediag/stimulus.hpp"
