#pragma once

#include "challenge.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "constraints.hpp"
#include "domain.hpp"
#include "facts.hpp"
#include "intervention.hpp"
#include "manifest.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "rule_dsl.hpp"
#include "sampler.hpp"
#include "scene.hpp"
