#pragma once

#include "mesocat/core.hpp"
#include "mesocat/params.hpp"
#include "mesocat/coherent.hpp"
#include "mesocat/quadrature.hpp"
#include "mesocat/fock.hpp"
#include "mesocat/lindblad.hpp"
#include "mesocat/analytic.hpp"
#include "mesocat/phasespace.hpp"
#include "mesocat/bell.hpp"
#include "mesocat/dissipative.hpp"
#include "mesocat/csv.hpp"
