#pragma once

#include "pilotguard/adversary.hpp"
#include "pilotguard/attack_plan.hpp"
#include "pilotguard/channel.hpp"
#include "pilotguard/detector.hpp"
#include "pilotguard/errors.hpp"
#include "pilotguard/experiment.hpp"
#include "pilotguard/keyconf.hpp"
#include "pilotguard/numerics.hpp"
#include "pilotguard/parallel.hpp"
#include "pilotguard/secrecy.hpp"
