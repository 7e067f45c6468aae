// Umbrella header.

#ifndef ISTOMO_ISTOMO_HPP
#define ISTOMO_ISTOMO_HPP

#include "istomo/elastic.hpp"
#include "istomo/boussinesq.hpp"
#include "istomo/polarization.hpp"
#include "istomo/forward.hpp"
#include "istomo/fit.hpp"
#include "istomo/io.hpp"

#endif  // ISTOMO_ISTOMO_HPP
