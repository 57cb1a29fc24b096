#ifndef QMOD_QMOD_HPP
#define QMOD_QMOD_HPP

#include "qmod/channel.hpp"
#include "qmod/defs.hpp"
#include "qmod/dynamics.hpp"
#include "qmod/entropy.hpp"
#include "qmod/fock.hpp"
#include "qmod/modulation.hpp"
#include "qmod/sweep.hpp"
#include "qmod/verify.hpp"

#endif  // QMOD_QMOD_HPP
