#ifndef OTALG_OTALG_HPP
#define OTALG_OTALG_HPP

#include "otalg/config.hpp"
#include "otalg/dynamics.hpp"
#include "otalg/errors.hpp"
#include "otalg/guidance.hpp"
#include "otalg/output.hpp"
#include "otalg/simulation.hpp"
#include "otalg/stats.hpp"
#include "otalg/terrain.hpp"
#include "otalg/vec3.hpp"

#endif
