#pragma once

// Everything in one include.

#include "integrals/abelian.hpp"
#include "integrals/catalog.hpp"
#include "integrals/constructors.hpp"
#include "integrals/descriptor.hpp"
#include "integrals/error.hpp"
#include "integrals/gauge.hpp"
#include "integrals/group_io.hpp"
#include "integrals/group_table.hpp"
#include "integrals/homomorphism.hpp"
#include "integrals/integrability.hpp"
#include "integrals/iso_aut.hpp"
#include "integrals/lattice.hpp"
#include "integrals/limits.hpp"
#include "integrals/parallel.hpp"
#include "integrals/perm_group.hpp"
#include "integrals/permutation.hpp"
#include "integrals/structure.hpp"
#include "integrals/towers.hpp"
