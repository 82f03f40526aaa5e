#ifndef COALGAME_COALGAME_HPP
#define COALGAME_COALGAME_HPP

#include "coalgame/core_model.hpp"
#include "coalgame/enumeration.hpp"
#include "coalgame/equilibrium.hpp"
#include "coalgame/report.hpp"
#include "coalgame/stability.hpp"
#include "coalgame/theory.hpp"

#endif  // COALGAME_COALGAME_HPP
