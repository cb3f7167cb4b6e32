#pragma once

#include "cmech/dynamics.hpp"
#include "cmech/errors.hpp"
#include "cmech/expression.hpp"
#include "cmech/hamiltonian.hpp"
#include "cmech/io.hpp"
#include "cmech/ode.hpp"
#include "cmech/parser.hpp"
#include "cmech/potential.hpp"
#include "cmech/reference_table.hpp"
#include "cmech/symplectic.hpp"
