#pragma once

#include "fintop/enumerate.hpp"
#include "fintop/finite_space.hpp"
#include "fintop/io.hpp"
#include "fintop/product.hpp"
#include "fintop/sweep.hpp"
#include "fintop/two_space.hpp"
