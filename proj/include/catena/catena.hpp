#pragma once

#include "catena/continuation.hpp"
#include "catena/deflection.hpp"
#include "catena/dynamics.hpp"
#include "catena/error.hpp"
#include "catena/fbp_solver.hpp"
#include "catena/geometry.hpp"
#include "catena/grid.hpp"
#include "catena/model.hpp"
#include "catena/newton.hpp"
#include "catena/parallel.hpp"
#include "catena/potential.hpp"
#include "catena/sar_solver.hpp"
#include "catena/shooting.hpp"
#include "catena/tridiagonal.hpp"
