#pragma once

#include "qcoarse/ecs.hpp"
#include "qcoarse/error.hpp"
#include "qcoarse/fock_photon.hpp"
#include "qcoarse/generic_bell.hpp"
#include "qcoarse/kernel_quad.hpp"
#include "qcoarse/leggett_garg.hpp"
#include "qcoarse/optimize.hpp"
#include "qcoarse/sweep.hpp"
