#pragma once

#include "piezoplate/errors.hpp"
#include "piezoplate/params.hpp"
#include "piezoplate/quadrature.hpp"
#include "piezoplate/modal_basis.hpp"
#include "piezoplate/coupling.hpp"
#include "piezoplate/tuning.hpp"
#include "piezoplate/dynamics.hpp"
#include "piezoplate/csv.hpp"
#include "piezoplate/config.hpp"
#include "piezoplate/scenario.hpp"
