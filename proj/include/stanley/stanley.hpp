#pragma once

#include "stanley/arith.hpp"
#include "stanley/basis.hpp"
#include "stanley/characters.hpp"
#include "stanley/core.hpp"
#include "stanley/errors.hpp"
#include "stanley/modsets.hpp"
#include "stanley/structure.hpp"
