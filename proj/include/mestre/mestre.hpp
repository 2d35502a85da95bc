#pragma once

#include "mestre/bounds.hpp"
#include "mestre/congruence.hpp"
#include "mestre/errors.hpp"
#include "mestre/io.hpp"
#include "mestre/linalg.hpp"
#include "mestre/numberfield.hpp"
#include "mestre/optimizer.hpp"
#include "mestre/quadrature.hpp"
#include "mestre/sums.hpp"
#include "mestre/testfunc.hpp"
