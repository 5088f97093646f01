#pragma once

#include "hpfem/assembly.hpp"
#include "hpfem/basis.hpp"
#include "hpfem/estimator.hpp"
#include "hpfem/geometry.hpp"
#include "hpfem/linsolve.hpp"
#include "hpfem/mesh.hpp"
#include "hpfem/mesh_io.hpp"
#include "hpfem/problem.hpp"
#include "hpfem/projection.hpp"
#include "hpfem/quadrature.hpp"
#include "hpfem/space.hpp"
#include "hpfem/sparse.hpp"
#include "hpfem/strategy.hpp"
