#pragma once

#include "aee/automaton.hpp"
#include "aee/config.hpp"
#include "aee/engine.hpp"
#include "aee/model.hpp"
#include "aee/plant.hpp"
#include "aee/rational.hpp"
#include "aee/report.hpp"
#include "aee/sequencing.hpp"
#include "aee/spec.hpp"
#include "aee/timing.hpp"
#include "aee/trace.hpp"
#include "aee/validate.hpp"
#include "aee/verify.hpp"
