#pragma once

#include "dphase/mesh.hpp"
#include "dphase/problem.hpp"
#include "dphase/energy.hpp"
#include "dphase/fibering.hpp"
#include "dphase/linalg.hpp"
#include "dphase/eigen.hpp"
#include "dphase/solver.hpp"
#include "dphase/io.hpp"
