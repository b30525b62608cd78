#pragma once

#include "dynim/dynamic.hpp"
#include "dynim/errors.hpp"
#include "dynim/family.hpp"
#include "dynim/fixture.hpp"
#include "dynim/graph.hpp"
#include "dynim/greedy.hpp"
#include "dynim/ic.hpp"
#include "dynim/mia.hpp"
#include "dynim/rng.hpp"
#include "dynim/scenario.hpp"
#include "dynim/seedstate.hpp"
#include "dynim/sketch.hpp"
#include "dynim/temporal.hpp"
