#ifndef TWOATOM_TWOATOM_HPP
#define TWOATOM_TWOATOM_HPP

#include "coherent_dynamics.hpp"
#include "collective_couplings.hpp"
#include "core.hpp"
#include "fock_dynamics.hpp"
#include "ode.hpp"
#include "operators.hpp"
#include "pulse_optimizer.hpp"
#include "pulse_shapes.hpp"
#include "sweep.hpp"
#include "trajectory.hpp"

#endif
