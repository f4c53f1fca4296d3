#pragma once

#define VLAB_VERSION "0.1.0"

#include "vlab/adiabatic_lab.hpp"
#include "vlab/clifford_spin.hpp"
#include "vlab/field_core.hpp"
#include "vlab/gl_dynamics.hpp"
#include "vlab/moduli_space.hpp"
#include "vlab/snapshot_io.hpp"
#include "vlab/sw_limit.hpp"
#include "vlab/vortex_statics.hpp"
